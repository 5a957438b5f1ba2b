package edge;
public @interface AnnotationType {
    String value() default "{";
    int[] levels() default {1, 2};
}
