package coursework;

// Homework 4, exercise 1: n-th Fibonacci number, iterative version.
// The recursive one from the lecture was way too slow for n = 45.
public class FibHomework {
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
