// Builds the amalgamated Catch2 runtime, including its default main.
#include <catch_amalgamated.cpp>
