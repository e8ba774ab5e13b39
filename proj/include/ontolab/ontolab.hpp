#pragma once

#include "ontolab/errors.hpp"
#include "ontolab/gallery.hpp"
#include "ontolab/independence.hpp"
#include "ontolab/joint.hpp"
#include "ontolab/kernel.hpp"
#include "ontolab/numeric.hpp"
#include "ontolab/quantum.hpp"
#include "ontolab/report.hpp"
#include "ontolab/rng.hpp"
#include "ontolab/scenario.hpp"
#include "ontolab/scenario_doc.hpp"
#include "ontolab/theorem.hpp"
#include "ontolab/version.hpp"
