package math.kit;

import static java.lang.Math.max;
import static java.lang.Math.min;
import java.util.*;
import math.kit.internal.*;

public class RangeKit {
    public static int clamp(int value, int low, int high) {
        return max(low, min(high, value));
    }

    public static List<Integer> pair(int a, int b) {
        return Arrays.asList(min(a, b), max(a, b));
    }
}
