package edge;
import java.util.*;
class Generics {
    Map<String, List<Integer>> index(Map<String, List<Integer>> m) { return m; }
    <T extends Comparable<? super T>> T max(Collection<? extends T> c) { return null; }
    List<List<List<String>>> deep() { return null; }
}
