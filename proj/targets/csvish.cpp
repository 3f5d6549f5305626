// Copyright 2026 The FuzzForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Toy target: line/field parser for a CSV-like text format with quoted
// fields ("..." with "" as the embedded-quote escape). No planted
// faults; this target exists for its state-machine branch structure.

#include "ff_target_rt.hpp"

namespace {

enum Block : std::uint32_t {
  kEntry = 0,
  kEmptyInput,
  kRowStart,
  kFieldStart,
  kUnquotedChar,
  kQuotedOpen,
  kQuotedChar,
  kQuoteEscape,
  kQuotedClose,
  kFieldComma,
  kRowNewline,
  kCarriageReturn,
  kUnterminatedQuote,
  kFieldDigits,
  kFieldEmpty,
  kFieldText,
  kRowWide,
  kRowNarrow,
  kDone,
  kBlockCount,
};

using ff::rt::block;

void csvish_body(const std::uint8_t* data, std::size_t len) {
  block(kEntry);
  if (len == 0) {
    block(kEmptyInput);
    return;
  }

  enum class State { kFieldStart, kUnquoted, kQuoted, kQuoteSeen };
  State state = State::kFieldStart;
  std::size_t field_len = 0;
  bool field_digits = true;
  unsigned fields_in_row = 0;
  bool row_open = false;

  auto end_field = [&] {
    if (field_len == 0) {
      block(kFieldEmpty);
    } else if (field_digits) {
      block(kFieldDigits);
    } else {
      block(kFieldText);
    }
    ++fields_in_row;
    field_len = 0;
    field_digits = true;
    state = State::kFieldStart;
  };

  auto end_row = [&] {
    block(fields_in_row > 4 ? kRowWide : kRowNarrow);
    fields_in_row = 0;
    row_open = false;
  };

  for (std::size_t i = 0; i < len; ++i) {
    const std::uint8_t c = data[i];
    if (!row_open) {
      block(kRowStart);
      row_open = true;
    }
    switch (state) {
      case State::kFieldStart:
        block(kFieldStart);
        if (c == '"') {
          block(kQuotedOpen);
          state = State::kQuoted;
          break;
        }
        state = State::kUnquoted;
        [[fallthrough]];
      case State::kUnquoted:
        if (c == ',') {
          block(kFieldComma);
          end_field();
        } else if (c == '\n') {
          block(kRowNewline);
          end_field();
          end_row();
        } else if (c == '\r') {
          block(kCarriageReturn);
        } else {
          block(kUnquotedChar);
          ++field_len;
          if (c < '0' || c > '9') field_digits = false;
        }
        break;
      case State::kQuoted:
        if (c == '"') {
          state = State::kQuoteSeen;
        } else {
          block(kQuotedChar);
          ++field_len;
          field_digits = false;
        }
        break;
      case State::kQuoteSeen:
        if (c == '"') {
          block(kQuoteEscape);  // "" inside a quoted field
          ++field_len;
          state = State::kQuoted;
        } else {
          block(kQuotedClose);
          state = State::kUnquoted;
          --i;  // reprocess as unquoted
        }
        break;
    }
  }

  if (state == State::kQuoted || state == State::kQuoteSeen) {
    block(kUnterminatedQuote);
  }
  if (row_open) {
    end_field();
    end_row();
  }
  block(kDone);
}

}  // namespace

int main(int argc, char** argv) {
  return ff::rt::target_main(argc, argv, {"csvish", kBlockCount}, csvish_body);
}
