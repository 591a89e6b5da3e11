#include "gpdephase/cli.hpp"

int main(int argc, char** argv) { return gpd::cli::main_entry(argc, argv); }
