package coursework;

// Homework 6, exercise 1. Largest value in an array.
// Starting from index 1 so the first element seeds the maximum.
public class BiggestFinder {
    public static int biggest(int[] values) {
        int best = values[0];
        for (int i = 1; i < values.length; i++) {
            if (values[i] > best) {
                best = values[i];
            }
        }
        return best;
    }
}
