#include <cstdio>

int main() {
    std::puts("fpalg: subcommands not wired up yet");
    return 2;
}
