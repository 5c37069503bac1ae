#include <iostream>

#include "nblab/app.hpp"

int main(int argc, char** argv)
{
    return nblab::app::run(argc, argv, std::cout, std::cerr);
}
