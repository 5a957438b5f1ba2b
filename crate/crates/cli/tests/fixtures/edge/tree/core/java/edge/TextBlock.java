package edge;
class TextBlock {
    String json() {
        return """
            { "a": "}" }
            """;
    }
    int after() { return 1; }
}
