// Sure! Here is a Java solution computing the greatest common divisor with Euclid's algorithm:
public class GreatestCommonDivisor {
    public static int gcd(int a, int b) {
        while (b != 0) {
            int rest = a % b;
            a = b;
            b = rest;
        }
        return a;
    }
}
