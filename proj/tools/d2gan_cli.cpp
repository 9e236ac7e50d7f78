#include <cstdio>

int main() {
  std::puts("d2gan: work in progress");
  return 1;
}
