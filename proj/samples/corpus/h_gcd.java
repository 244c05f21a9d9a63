package coursework;

// Homework 4, exercise 2. Euclid's algorithm from the blackboard.
public class GcdTask {
    public static int gcd(int a, int b) {
        while (b != 0) {
            int rest = a % b;
            a = b;
            b = rest;
        }
        return a;
    }
}
