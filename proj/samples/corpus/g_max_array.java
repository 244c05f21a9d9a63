// Here is a straightforward Java solution that finds the maximum of an array:
public class MaxOfArray {
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
