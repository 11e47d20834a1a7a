#pragma once

#include <arrwit/analysis.hpp>
#include <arrwit/ast.hpp>
#include <arrwit/dataflow.hpp>
#include <arrwit/differential.hpp>
#include <arrwit/emit.hpp>
#include <arrwit/errors.hpp>
#include <arrwit/grammar.hpp>
#include <arrwit/oracle.hpp>
#include <arrwit/parser.hpp>
#include <arrwit/precision.hpp>
#include <arrwit/printer.hpp>
#include <arrwit/report.hpp>
#include <arrwit/transform.hpp>
