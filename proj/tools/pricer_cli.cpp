#include <cstdio>
int main(){ std::puts("pricer"); }
