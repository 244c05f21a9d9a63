// Here is a simple Java solution that sums the digits of an integer:
public class SumDigits {
    public static int sumDigits(int value) {
        int total = 0;
        value = Math.abs(value);
        while (value > 0) {
            total += value % 10;
            value /= 10;
        }
        return total;
    }
}
