package coursework;

// Homework 5, exercise 1: count vowels in a sentence.
// indexOf felt easier than five == comparisons.
public class VowelCounterHw {
    public static int count(String sentence) {
        int vowels = 0;
        String lower = sentence.toLowerCase();
        for (int i = 0; i < lower.length(); i++) {
            if ("aeiou".indexOf(lower.charAt(i)) >= 0) {
                vowels++;
            }
        }
        return vowels;
    }
}
