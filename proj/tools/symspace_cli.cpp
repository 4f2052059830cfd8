#include <cstdio>

int main() {
  std::puts("symspace_cli: not wired up yet");
  return 1;
}
