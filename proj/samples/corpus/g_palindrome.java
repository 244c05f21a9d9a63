// Certainly! Here is a Java solution that checks whether a string is a palindrome:
public class PalindromeChecker {
    public static boolean check(String word) {
        int left = 0;
        int right = word.length() - 1;
        while (left < right) {
            if (word.charAt(left) != word.charAt(right)) {
                return false;
            }
            left++;
            right--;
        }
        return true;
    }
}
