// Certainly! Here is a Java solution that prints a Celsius conversion table:
public class CelsiusTable {
    public static double toFahrenheit(double celsius) {
        return celsius * 9.0 / 5.0 + 32.0;
    }

    public static void main(String[] args) {
        for (int c = -10; c <= 40; c += 5) {
            System.out.println(c + " C = " + toFahrenheit(c) + " F");
        }
    }
}
