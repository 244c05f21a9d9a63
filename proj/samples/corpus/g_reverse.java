import java.util.StringJoiner;

// Of course! Here is a Java solution that reverses the order of the words in a line:
public class ReverseWords {
    public static String flip(String line) {
        String[] words = line.trim().split("\\s+");
        StringJoiner joined = new StringJoiner(" ");
        for (int i = words.length - 1; i >= 0; i--) {
            joined.add(words[i]);
        }
        return joined.toString();
    }
}
