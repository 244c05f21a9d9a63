// Utility for summing digits of a number.
public class DigitSum {
    // no state

    /** Returns the sum of decimal digits of n. */
    public static int of(int n) {
        int total = 0; // accumulator
        n = Math.abs(n); // handle negatives
        while (n > 0) { // peel one digit per loop
            total += n % 10;
            n /= 10; /* integer division */
        }
        return total; // done
    }
} // end of class
