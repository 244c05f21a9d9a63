package coursework;

// Homework 3, exercise 2. A word reads the same backwards.
public class MyPalindrome {
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
