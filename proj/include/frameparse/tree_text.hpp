#pragma once

// Indented parse-tree text format:
//
//   "John bought a book.":
//     synt/sem: S-SNT/I-EV-BUY
//     forms: (3rd_person sing past_tense)
//     lex: "buy"
//     subs:
//     (SUBJ AGENT) "John":
//       synt/sem: S-NP/I-EN-JOHN
//       ...
//
// Field order is fixed: synt/sem, forms, lex, token, extras, subs. `forms` is
// written only when set, `lex` only when it differs from the surface, and
// `token` carries the token index of leaves. Spans of inner frames are derived
// from their children.

#include <string>
#include <string_view>

#include "frameparse/frame.hpp"

namespace frameparse {

std::string render_tree(const Frame& frame);

// Exact inverse of render_tree. Throws Error(MalformedTree) with a line number.
Frame parse_tree_text(std::string_view text);

}  // namespace frameparse
