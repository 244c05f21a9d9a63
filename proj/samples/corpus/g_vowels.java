// Here is a Java solution that counts the vowels in a string:
public class VowelCount {
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
