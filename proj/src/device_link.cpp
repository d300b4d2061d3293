#include "holo/device_link.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

namespace holo::device {

namespace {

constexpr double kPhaseStep = kTwoPi / kPhaseSteps;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

DeviceFrame quantize(const Hologram& hologram, std::uint32_t sequence) {
  DeviceFrame f;
  f.sequence = sequence;
  const auto n = static_cast<std::size_t>(hologram.size());
  if (n > 0xFFFF) throw ConfigError("frame cannot carry more than 65535 transducers");
  f.phase.resize(n);
  f.amplitude.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Complex x = hologram.activations()[static_cast<Eigen::Index>(t)];
    const double a = std::abs(x);
    if (!std::isfinite(a) || a > 1.0 + 1e-9) {
      throw ConfigError("transducer " + std::to_string(t) + " amplitude " + std::to_string(a) + " exceeds 1");
    }
    double phi = std::fmod(std::arg(x), kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    f.phase[t] = static_cast<std::uint8_t>(std::lround(phi / kPhaseStep) % kPhaseSteps);
    f.amplitude[t] = static_cast<std::uint8_t>(std::lround(255.0 * std::min(a, 1.0)));
  }
  return f;
}

ComplexVector dequantize(const DeviceFrame& frame) {
  if (frame.phase.size() != frame.amplitude.size()) throw ConfigError("frame phase/amplitude length mismatch");
  ComplexVector x(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t t = 0; t < frame.size(); ++t) {
    x[static_cast<Eigen::Index>(t)] = std::polar(frame.amplitude[t] / 255.0, frame.phase[t] * kPhaseStep);
  }
  return x;
}

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : bytes) {
    crc ^= static_cast<std::uint16_t>(byte << 8);
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : static_cast<std::uint16_t>(crc << 1);
    }
  }
  return crc;
}

std::size_t encoded_size(std::size_t transducers) { return kFrameOverhead + 2 * transducers; }

std::vector<std::uint8_t> encode_frame(const DeviceFrame& frame) {
  if (frame.phase.size() != frame.amplitude.size()) throw ConfigError("frame phase/amplitude length mismatch");
  if (frame.size() > 0xFFFF) throw ConfigError("frame cannot carry more than 65535 transducers");
  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(frame.size()));
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kVersion);
  put_u32(out, frame.sequence);
  put_u16(out, static_cast<std::uint16_t>(frame.size()));
  for (std::size_t t = 0; t < frame.size(); ++t) {
    if (frame.phase[t] >= kPhaseSteps) throw ConfigError("phase index out of range");
    out.push_back(frame.phase[t]);
    out.push_back(frame.amplitude[t]);
  }
  put_u16(out, crc16_ccitt(out));
  return out;
}

std::string_view to_string(FrameErrorCode code) {
  switch (code) {
    case FrameErrorCode::BadMagic:
      return "bad-magic";
    case FrameErrorCode::BadVersion:
      return "bad-version";
    case FrameErrorCode::Truncated:
      return "truncated";
    case FrameErrorCode::BadCrc:
      return "bad-crc";
    case FrameErrorCode::BadLength:
      return "bad-length";
  }
  return "unknown";
}

DeviceFrame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) throw FrameError(FrameErrorCode::Truncated, "frame truncated before magic");
  if (bytes[0] != kMagic0 || bytes[1] != kMagic1) throw FrameError(FrameErrorCode::BadMagic, "frame has bad magic");
  if (bytes.size() < 9) throw FrameError(FrameErrorCode::Truncated, "frame truncated in header");
  if (bytes[2] != kVersion) {
    throw FrameError(FrameErrorCode::BadVersion, "unsupported frame version " + std::to_string(bytes[2]));
  }
  const std::size_t count = get_u16(bytes, 7);
  const std::size_t total = encoded_size(count);
  if (bytes.size() < total) throw FrameError(FrameErrorCode::Truncated, "frame truncated in payload");
  if (bytes.size() > total) throw FrameError(FrameErrorCode::BadLength, "frame has trailing bytes");
  if (crc16_ccitt(bytes.first(total - 2)) != get_u16(bytes, total - 2)) {
    throw FrameError(FrameErrorCode::BadCrc, "frame CRC mismatch");
  }
  DeviceFrame f;
  f.sequence = get_u32(bytes, 3);
  f.phase.resize(count);
  f.amplitude.resize(count);
  for (std::size_t t = 0; t < count; ++t) {
    f.phase[t] = bytes[9 + 2 * t];
    f.amplitude[t] = bytes[10 + 2 * t];
    if (f.phase[t] >= kPhaseSteps) throw FrameError(FrameErrorCode::BadLength, "phase index out of range");
  }
  return f;
}

void LoopbackSink::send(std::span<const std::uint8_t> bytes) {
  const auto now = std::chrono::steady_clock::now();
  records_.push_back({decode_frame(bytes), now});
}

struct FileSink::Impl {
  std::ofstream out;
  std::string path;
};

FileSink::FileSink(const std::string& path) : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) throw IoError("cannot open frame file '" + path + "'");
}

FileSink::~FileSink() = default;

void FileSink::send(std::span<const std::uint8_t> bytes) {
  impl_->out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!impl_->out) throw IoError("write to '" + impl_->path + "' failed");
}

void FileSink::flush() {
  impl_->out.flush();
  if (!impl_->out) throw IoError("flush of '" + impl_->path + "' failed");
}

UdpSink::UdpSink(const std::string& host, std::uint16_t port, RetryPolicy policy) : policy_(policy) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  const std::string service = std::to_string(port);
  std::string last_error = "no addresses";
  for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(policy_.delay);
    addrinfo* result = nullptr;
    const int rc = getaddrinfo(host.c_str(), service.c_str(), &hints, &result);
    if (rc != 0) {
      last_error = gai_strerror(rc);
      continue;
    }
    for (addrinfo* ai = result; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      last_error = std::strerror(errno);
      ::close(fd);
    }
    freeaddrinfo(result);
    if (fd_ >= 0) return;
  }
  throw IoError("udp sink " + host + ":" + service + " unreachable after " + std::to_string(policy_.retries) +
                " retries: " + last_error);
}

UdpSink::~UdpSink() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpSink::send(std::span<const std::uint8_t> bytes) {
  for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(policy_.delay);
    const ssize_t sent = ::send(fd_, bytes.data(), bytes.size(), 0);
    if (sent == static_cast<ssize_t>(bytes.size())) return;
    if (sent < 0 && errno != ECONNREFUSED && errno != EAGAIN && errno != EINTR && errno != ENOBUFS) break;
  }
  throw IoError(std::string("udp send failed: ") + std::strerror(errno));
}

std::unique_ptr<FrameSink> make_sink(std::string_view spec, RetryPolicy policy) {
  if (spec == "loopback") return std::make_unique<LoopbackSink>();
  if (spec.starts_with("file:")) {
    const auto path = spec.substr(5);
    if (path.empty()) throw ConfigError("file sink needs a path");
    return std::make_unique<FileSink>(std::string(path));
  }
  if (spec.starts_with("udp:")) {
    const auto rest = spec.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw ConfigError("udp sink must be udp:<host>:<port>");
    const std::string port_text(rest.substr(colon + 1));
    int port = 0;
    try {
      std::size_t used = 0;
      port = std::stoi(port_text, &used);
      if (used != port_text.size()) port = -1;
    } catch (const std::exception&) {
      port = -1;
    }
    if (port < 1 || port > 65535) throw ConfigError("udp sink port '" + port_text + "' is invalid");
    return std::make_unique<UdpSink>(std::string(rest.substr(0, colon)), static_cast<std::uint16_t>(port), policy);
  }
  throw ConfigError("unknown sink '" + std::string(spec) + "' (expected loopback, file:<path> or udp:<host>:<port>)");
}

namespace {

// Bounded single-producer single-consumer queue; push blocks while full.
class FrameQueue {
 public:
  explicit FrameQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

  bool push(std::vector<std::uint8_t> item) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  std::optional<std::vector<std::uint8_t>> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty() || finished_ || closed_; });
    if (items_.empty()) return std::nullopt;
    auto item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  // Producer is done; consumer drains what is left.
  void finish() {
    std::lock_guard lock(mutex_);
    finished_ = true;
    not_empty_.notify_all();
  }

  // Consumer failed; unblock the producer.
  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::deque<std::vector<std::uint8_t>> items_;
  bool finished_ = false;
  bool closed_ = false;
  std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
};

}  // namespace

StreamReport stream(const std::vector<DeviceFrame>& frames, FrameSink& sink, double rate,
                    const StreamOptions& options) {
  if (!(rate >= 1.0 && rate <= 10000.0)) throw ConfigError("stream rate must be within 1..10000 Hz");
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / rate));

  StreamReport report;
  report.target_rate = rate;
  if (frames.empty()) return report;

  FrameQueue queue(options.queue_capacity);
  std::exception_ptr failure;
  std::vector<clock::time_point> sent;
  sent.reserve(frames.size());
  double max_jitter = 0.0;

  std::thread pacer([&] {
    try {
      clock::time_point start{};
      std::size_t index = 0;
      while (auto bytes = queue.pop()) {
        if (index == 0) start = clock::now();
        const auto deadline = start + static_cast<long long>(index) * period;
        std::this_thread::sleep_until(deadline - options.spin_window);
        while (clock::now() < deadline) {
        }
        sink.send(*bytes);
        const auto now = clock::now();
        sent.push_back(now);
        max_jitter = std::max(max_jitter, std::chrono::duration<double>(now - deadline).count());
        ++index;
      }
    } catch (...) {
      failure = std::current_exception();
      queue.close();
    }
  });

  // Encode everything up front would defeat the bounded queue, so frames are
  // encoded as the pacer consumes them.
  try {
    for (const DeviceFrame& f : frames) {
      if (!queue.push(encode_frame(f))) break;
    }
  } catch (...) {
    queue.close();
    pacer.join();
    throw;
  }
  queue.finish();
  pacer.join();
  if (failure) std::rethrow_exception(failure);
  sink.flush();

  report.frames = sent.size();
  report.max_jitter = max_jitter;
  if (sent.size() >= 2) {
    const double elapsed = std::chrono::duration<double>(sent.back() - sent.front()).count();
    report.achieved_rate = elapsed > 0.0 ? static_cast<double>(sent.size() - 1) / elapsed : 0.0;
    if (report.achieved_rate < 0.95 * rate) {
      warn("stream achieved " + std::to_string(report.achieved_rate) + " Hz against a target of " +
           std::to_string(rate) + " Hz");
    }
  }
  return report;
}

}  // namespace holo::device
