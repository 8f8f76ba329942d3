#include "app.hpp"

int main(int argc, char** argv) { return limerefine::app::run(argc, argv); }
