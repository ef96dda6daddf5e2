#include "gts/cli/commands.hpp"

int main(int argc, char** argv) {
    return gts::cli::run(argc, argv);
}
