#include "fockprop/experiment.hpp"

int main(int argc, char** argv) { return fockprop::run_cli(argc, argv); }
