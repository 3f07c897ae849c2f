#include <cstdio>

int main() {
  std::puts("stvae placeholder");
  return 0;
}
