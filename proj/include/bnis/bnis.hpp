#pragma once

#include <bnis/error.hpp>
#include <bnis/model.hpp>
#include <bnis/graph.hpp>
#include <bnis/factor.hpp>
#include <bnis/exact.hpp>
#include <bnis/transform.hpp>
#include <bnis/lbp.hpp>
#include <bnis/influence.hpp>
#include <bnis/rng.hpp>
#include <bnis/sampler.hpp>
#include <bnis/io.hpp>
#include <bnis/bench.hpp>
