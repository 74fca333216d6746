#pragma once

#include "penbsde/constrained.hpp"
#include "penbsde/control.hpp"
#include "penbsde/errors.hpp"
#include "penbsde/model.hpp"
#include "penbsde/penalized.hpp"
#include "penbsde/random_stream.hpp"
#include "penbsde/reference.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/switching.hpp"
#include "penbsde/value_field.hpp"
