#include "cwh/time.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <iterator>

namespace cwh {

namespace {

using std::chrono::seconds;

struct TransitionRule
{
  enum class Kind
  {
    month_week_day, // Mm.w.d
    julian,         // Jn, 1..365, February 29 never counted
    zero_based      // n, 0..365
  };
  Kind kind = Kind::month_week_day;
  int month = 0;
  int week = 0;
  int weekday = 0;
  int day = 0;
  seconds time{ 7200 };

  std::chrono::local_seconds at(std::chrono::year y) const
  {
    using namespace std::chrono;
    local_days day_start;
    switch (kind) {
      case Kind::month_week_day: {
        auto m = std::chrono::month{ static_cast<unsigned>(month) };
        auto wd = std::chrono::weekday{ static_cast<unsigned>(weekday) };
        if (week >= 5) {
          day_start = local_days{ y / m / wd[last] };
        } else {
          day_start = local_days{ y / m / wd[static_cast<unsigned>(week)] };
        }
        break;
      }
      case Kind::julian: {
        int offset = day - 1;
        if (y.is_leap() && day >= 60) {
          ++offset;
        }
        day_start = local_days{ y / January / 1 } + days{ offset };
        break;
      }
      case Kind::zero_based:
        day_start = local_days{ y / January / 1 } + days{ day };
        break;
    }
    return day_start + time;
  }
};

class PosixParser
{
public:
  explicit PosixParser(std::string_view text)
    : text_(text)
  {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  void expect(char c)
  {
    if (peek() != c) {
      fail(fmt::format("expected '{}'", c));
    }
    ++pos_;
  }

  std::string name()
  {
    std::string out;
    if (peek() == '<') {
      ++pos_;
      while (!done() && peek() != '>') {
        out.push_back(text_[pos_++]);
      }
      expect('>');
    } else {
      while (!done() && std::isalpha(static_cast<unsigned char>(peek()))) {
        out.push_back(text_[pos_++]);
      }
    }
    if (out.size() < 3) {
      fail("zone abbreviation too short");
    }
    return out;
  }

  int number()
  {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      fail("expected a number");
    }
    int value = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      value = value * 10 + (text_[pos_++] - '0');
    }
    return value;
  }

  // [+|-]hh[:mm[:ss]]
  seconds clock()
  {
    int sign = 1;
    if (peek() == '+' || peek() == '-') {
      sign = text_[pos_++] == '-' ? -1 : 1;
    }
    int total = number() * 3600;
    if (peek() == ':') {
      ++pos_;
      total += number() * 60;
      if (peek() == ':') {
        ++pos_;
        total += number();
      }
    }
    return seconds{ sign * total };
  }

  TransitionRule transition()
  {
    TransitionRule rule;
    if (peek() == 'M') {
      ++pos_;
      rule.kind = TransitionRule::Kind::month_week_day;
      rule.month = number();
      expect('.');
      rule.week = number();
      expect('.');
      rule.weekday = number();
      if (rule.month < 1 || rule.month > 12 || rule.week < 1 || rule.week > 5 ||
          rule.weekday > 6) {
        fail("invalid Mm.w.d rule");
      }
    } else if (peek() == 'J') {
      ++pos_;
      rule.kind = TransitionRule::Kind::julian;
      rule.day = number();
      if (rule.day < 1 || rule.day > 365) {
        fail("invalid Jn rule");
      }
    } else {
      rule.kind = TransitionRule::Kind::zero_based;
      rule.day = number();
      if (rule.day > 365) {
        fail("invalid n rule");
      }
    }
    if (peek() == '/') {
      ++pos_;
      rule.time = clock();
    }
    return rule;
  }

  [[noreturn]] void fail(const std::string& what) const
  {
    throw ValueError(fmt::format("invalid POSIX TZ rule '{}': {}", text_, what));
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string read_footer(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return {};
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (content.size() < 5 || content.compare(0, 4, "TZif") != 0 || content[4] < '2') {
    return {};
  }
  if (content.back() != '\n') {
    return {};
  }
  auto begin = content.rfind('\n', content.size() - 2);
  if (begin == std::string::npos) {
    return {};
  }
  return content.substr(begin + 1, content.size() - begin - 2);
}

} // namespace

struct TimeZone::Rule
{
  std::string name;
  std::string posix;
  seconds std_offset{ 0 };
  std::optional<seconds> dst_offset;
  TransitionRule dst_start;
  TransitionRule dst_end;

  bool in_dst(Instant t) const
  {
    using namespace std::chrono;
    if (!dst_offset) {
      return false;
    }
    auto local = local_seconds{ t.time_since_epoch() + std_offset };
    auto y = year_month_day{ floor<days>(local) }.year();
    auto start = Instant{ dst_start.at(y).time_since_epoch() - std_offset };
    auto end = Instant{ dst_end.at(y).time_since_epoch() - *dst_offset };
    if (start < end) {
      return start <= t && t < end;
    }
    return !(end <= t && t < start);
  }
};

TimeZone::TimeZone()
  : TimeZone(utc())
{}

TimeZone::TimeZone(std::shared_ptr<const Rule> rule)
  : rule_(std::move(rule))
{}

TimeZone TimeZone::utc()
{
  static const auto rule = [] {
    auto r = std::make_shared<Rule>();
    r->name = "UTC";
    r->posix = "UTC0";
    return r;
  }();
  return TimeZone(rule);
}

TimeZone TimeZone::fixed(std::chrono::seconds utc_offset)
{
  auto r = std::make_shared<Rule>();
  auto total = utc_offset.count();
  auto magnitude = total < 0 ? -total : total;
  r->name = fmt::format("{}{:02}:{:02}", total < 0 ? '-' : '+', magnitude / 3600, (magnitude % 3600) / 60);
  // POSIX offsets count westward.
  r->posix = fmt::format("<{}>{}{}:{:02}", r->name, total <= 0 ? "" : "-", magnitude / 3600, (magnitude % 3600) / 60);
  r->std_offset = utc_offset;
  return TimeZone(std::move(r));
}

TimeZone TimeZone::from_posix(std::string_view rule, std::string name)
{
  PosixParser p(rule);
  auto r = std::make_shared<Rule>();
  r->posix = std::string(rule);
  auto std_name = p.name();
  r->std_offset = -p.clock();
  if (!p.done()) {
    p.name();
    if (!p.done() && p.peek() != ',') {
      r->dst_offset = -p.clock();
    } else {
      r->dst_offset = r->std_offset + std::chrono::hours{ 1 };
    }
    if (p.done()) {
      // No explicit rule: POSIX default is implementation-defined, use US rules.
      r->dst_start = TransitionRule{ TransitionRule::Kind::month_week_day, 3, 2, 0, 0, seconds{ 7200 } };
      r->dst_end = TransitionRule{ TransitionRule::Kind::month_week_day, 11, 1, 0, 0, seconds{ 7200 } };
    } else {
      p.expect(',');
      r->dst_start = p.transition();
      p.expect(',');
      r->dst_end = p.transition();
    }
  }
  if (!p.done()) {
    p.fail("trailing characters");
  }
  r->name = name.empty() ? std::string(rule) : std::move(name);
  return TimeZone(std::move(r));
}

TimeZone TimeZone::locate(std::string_view name)
{
  if (name == "UTC" || name == "Etc/UTC" || name == "Z" || name == "GMT") {
    return utc();
  }
  if (name.empty()) {
    throw ValueError("empty time zone name");
  }
  if (name.find("..") == std::string_view::npos && name.front() != '/') {
    const char* dir = std::getenv("TZDIR");
    std::string path = fmt::format("{}/{}", dir ? dir : "/usr/share/zoneinfo", name);
    auto footer = read_footer(path);
    if (!footer.empty()) {
      return from_posix(footer, std::string(name));
    }
  }
  if (name == default_zone_name) {
    // Hosts without a zoneinfo tree still get the default zone.
    return from_posix("CET-1CEST,M3.5.0,M10.5.0/3", std::string(name));
  }
  try {
    return from_posix(name);
  } catch (const ValueError&) {
    throw ValueError(fmt::format("unknown time zone '{}'", name));
  }
}

TimeZone TimeZone::default_zone()
{
  const char* env = std::getenv("CWH_TZ");
  if (env != nullptr && *env != '\0') {
    return locate(env);
  }
  return locate(default_zone_name);
}

const std::string& TimeZone::name() const
{
  return rule_->name;
}

const std::string& TimeZone::posix_rule() const
{
  return rule_->posix;
}

std::chrono::seconds TimeZone::offset_at(Instant t) const
{
  return rule_->in_dst(t) ? *rule_->dst_offset : rule_->std_offset;
}

LocalTime TimeZone::to_local(Instant t) const
{
  return LocalTime{ t.time_since_epoch() + offset_at(t) };
}

std::vector<Instant> TimeZone::from_local(LocalTime lt) const
{
  std::vector<Instant> out;
  std::vector<seconds> offsets{ rule_->std_offset };
  if (rule_->dst_offset) {
    offsets.push_back(*rule_->dst_offset);
  }
  for (auto off : offsets) {
    Instant candidate{ lt.time_since_epoch() - off };
    if (offset_at(candidate) == off) {
      out.push_back(candidate);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool TimeZone::operator==(const TimeZone& other) const
{
  return rule_ == other.rule_ || rule_->posix == other.rule_->posix;
}

namespace {

class TimestampReader
{
public:
  explicit TimestampReader(std::string_view text)
    : text_(text)
  {}

  int digits(std::size_t count)
  {
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail();
      }
      value = value * 10 + (text_[pos_++] - '0');
    }
    return value;
  }

  bool accept(char c)
  {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool done() const { return pos_ >= text_.size(); }
  void skip() { ++pos_; }

  [[noreturn]] void fail() const
  {
    throw SchemaError(fmt::format("unparseable timestamp '{}'", text_));
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

Instant parse_timestamp(std::string_view text, const TimeZone& tz, std::optional<Instant> after)
{
  using namespace std::chrono;
  TimestampReader r(text);
  int y = r.digits(4);
  if (!r.accept('-')) {
    r.fail();
  }
  int mo = r.digits(2);
  if (!r.accept('-')) {
    r.fail();
  }
  int d = r.digits(2);
  if (!r.accept('T') && !r.accept(' ')) {
    r.fail();
  }
  int hh = r.digits(2);
  if (!r.accept(':')) {
    r.fail();
  }
  int mm = r.digits(2);
  int ss = 0;
  if (r.accept(':')) {
    ss = r.digits(2);
    if (r.accept('.')) {
      while (std::isdigit(static_cast<unsigned char>(r.peek()))) {
        r.skip();
      }
    }
  }
  year_month_day ymd{ year{ y }, month{ static_cast<unsigned>(mo) }, day{ static_cast<unsigned>(d) } };
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    r.fail();
  }
  auto local = local_days{ ymd } + hours{ hh } + minutes{ mm } + seconds{ ss };

  if (r.accept('Z')) {
    if (!r.done()) {
      r.fail();
    }
    return Instant{ local.time_since_epoch() };
  }
  if (r.peek() == '+' || r.peek() == '-') {
    int sign = r.peek() == '-' ? -1 : 1;
    r.skip();
    int oh = r.digits(2);
    int om = 0;
    if (r.accept(':')) {
      om = r.digits(2);
    } else if (!r.done()) {
      om = r.digits(2);
    }
    if (!r.done()) {
      r.fail();
    }
    return Instant{ local.time_since_epoch() - seconds{ sign * (oh * 3600 + om * 60) } };
  }
  if (!r.done()) {
    r.fail();
  }
  auto candidates = tz.from_local(local);
  if (candidates.empty()) {
    throw SchemaError(fmt::format("timestamp '{}' does not exist in time zone {}", text, tz.name()));
  }
  if (after) {
    for (auto c : candidates) {
      if (c > *after) {
        return c;
      }
    }
  }
  return candidates.front();
}

std::string format_timestamp(Instant t, const TimeZone& tz)
{
  using namespace std::chrono;
  auto off = tz.offset_at(t);
  auto local = LocalTime{ t.time_since_epoch() + off };
  auto day_start = floor<days>(local);
  year_month_day ymd{ day_start };
  hh_mm_ss<seconds> hms{ local - day_start };
  auto total = off.count();
  auto magnitude = total < 0 ? -total : total;
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}{}{:02}:{:02}",
                     static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()),
                     hms.hours().count(),
                     hms.minutes().count(),
                     hms.seconds().count(),
                     total < 0 ? '-' : '+',
                     magnitude / 3600,
                     (magnitude % 3600) / 60);
}

int local_minute_of_day(Instant t, const TimeZone& tz)
{
  using namespace std::chrono;
  auto local = tz.to_local(t);
  auto since_midnight = local - floor<days>(local);
  return static_cast<int>(duration_cast<minutes>(since_midnight).count());
}

std::chrono::year_month_day local_date(Instant t, const TimeZone& tz)
{
  using namespace std::chrono;
  return year_month_day{ floor<days>(tz.to_local(t)) };
}

std::string format_date(std::chrono::year_month_day date)
{
  return fmt::format("{:04}-{:02}-{:02}",
                     static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()),
                     static_cast<unsigned>(date.day()));
}

} // namespace cwh
