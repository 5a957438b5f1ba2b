package edge;
enum EnumBodies {
    A {
        void special() {}
    },
    B;
    void common() {}
    EnumBodies() {}
}
