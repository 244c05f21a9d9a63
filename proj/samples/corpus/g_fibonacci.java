// Here is an iterative Java solution for the Fibonacci sequence:
public class Fibonacci {
    public static long fib(int n) {
        long previous = 0;
        long current = 1;
        for (int i = 0; i < n; i++) {
            long next = previous + current;
            previous = current;
            current = next;
        }
        return previous;
    }
}
