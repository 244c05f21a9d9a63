import java.util.Scanner;

public class MaxIncreasingSubstring {
    public static void main(String[] args) {
        // Read the input string from the user
        Scanner scanner = new Scanner(System.in);
        System.out.print("Enter a string: ");
        String text = scanner.nextLine();

        String best = "";
        String current = "";
        for (int i = 0; i < text.length(); i++) {
            // Extend the run while characters keep increasing
            if (current.isEmpty() || text.charAt(i) > current.charAt(current.length() - 1)) {
                current += text.charAt(i);
            } else {
                current = "" + text.charAt(i);
            }
            if (current.length() > best.length()) {
                best = current;
            }
        }
        System.out.println("Maximum consecutive increasing substring: " + best);
    }
}
