package app4;

class Four {
    void go(Api api) {
        api.alpha();
        api.beta(1, 2);
        gamma(3);
    }
}
