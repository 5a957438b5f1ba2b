package edge;
class GenericClass<K extends Comparable<K>, V> {
    V get(K key) { return null; }
    <R> GenericClass<K, R> map(java.util.function.Function<? super V, ? extends R> f) { return null; }
}
