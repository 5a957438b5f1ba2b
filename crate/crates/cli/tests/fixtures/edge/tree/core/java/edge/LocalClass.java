package edge;
class LocalClass {
    void host() {
        class Local { void hidden() {} }
        new Local().hidden();
    }
}
