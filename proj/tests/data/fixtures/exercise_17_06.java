package ch_17.exercise17_06;

import ch_17.exercise17_01.Exercise17_01;
import java.util.Scanner;

/**
 * Find the maximum consecutive increasingly ordered substring.
 */
public class Exercise17_06 {
    public static void main(String[] args) {
        Scanner input = new Scanner(System.in);
        System.out.print("Enter a string: ");  // prompt
        String s = input.nextLine();
        System.out.println("Maximum consecutive substring is " + maxSubstring(s));
    }

    /** Scans once, tracking the current ascending run. */
    private static String maxSubstring(String s) {
        int bestStart = 0, bestLength = 1;
        int start = 0;
        for (int i = 1; i < s.length(); i++) {
            if (s.charAt(i) <= s.charAt(i - 1)) {
                start = i;
            }
            if (i - start + 1 > bestLength) {
                bestLength = i - start + 1;
                bestStart = start;
            }
        }
        return s.substring(bestStart, bestStart + bestLength);
    }
}
