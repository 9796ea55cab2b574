#include <cstdio>

int main() {
  std::puts("ldft cli placeholder");
  return 0;
}
