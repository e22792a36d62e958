#pragma once

#include <stdexcept>
#include <string>

namespace lcomp {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Malformed LCT1/LCP1 bytes. field() names the first violated header field
// ("magic", "version", "dtype", "dims", "truncated", ...).
class FormatError : public Error {
public:
	FormatError(std::string format, std::string field, const std::string& detail = {})
	    : Error(format + " format error: " + field + (detail.empty() ? "" : " (" + detail + ")")),
	      format_(std::move(format)), field_(std::move(field)) {}

	const std::string& format() const noexcept { return format_; }
	const std::string& field() const noexcept { return field_; }

private:
	std::string format_;
	std::string field_;
};

// Precondition violations on shapes, dims, masks and configs.
class ShapeError : public Error {
public:
	using Error::Error;
};

class IoError : public Error {
public:
	using Error::Error;
};

// Non-finite values or divergence during training.
class NumericError : public Error {
public:
	using Error::Error;
};

} // namespace lcomp
