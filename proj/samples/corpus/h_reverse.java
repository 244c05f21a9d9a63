package coursework;

import java.util.StringJoiner;

// Homework 5, exercise 2: print the words of a line backwards.
public class FlipWords {
    public static String flip(String line) {
        String[] words = line.trim().split("\\s+");
        StringJoiner joined = new StringJoiner(" ");
        for (int i = words.length - 1; i >= 0; i--) {
            joined.add(words[i]);
        }
        return joined.toString();
    }
}
