#pragma once

#include "schedseq/seqcore.hpp"
#include "schedseq/constructor.hpp"
#include "schedseq/verifier.hpp"
#include "schedseq/random_schemes.hpp"
#include "schedseq/simulator.hpp"
#include "schedseq/io.hpp"
