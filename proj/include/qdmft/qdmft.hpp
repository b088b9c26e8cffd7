#pragma once

#include "qdmft/cli.hpp"
#include "qdmft/config.hpp"
#include "qdmft/dmft.hpp"
#include "qdmft/ed_oracle.hpp"
#include "qdmft/greens.hpp"
#include "qdmft/hamiltonian.hpp"
#include "qdmft/pauli.hpp"
#include "qdmft/statevector.hpp"
#include "qdmft/verify.hpp"
#include "qdmft/vqe.hpp"
