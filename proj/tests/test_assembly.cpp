#include <doctest.h>
TEST_SUITE("assembly") {}
