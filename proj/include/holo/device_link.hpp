#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "holo/solvers.hpp"

namespace holo::device {

inline constexpr int kPhaseSteps = 128;
inline constexpr std::uint8_t kMagic0 = 0xAC;
inline constexpr std::uint8_t kMagic1 = 0x57;
inline constexpr std::uint8_t kVersion = 1;
/// magic(2) + version(1) + sequence(4) + count(2) + crc(2).
inline constexpr std::size_t kFrameOverhead = 11;

struct DeviceFrame {
  std::uint32_t sequence = 0;
  std::vector<std::uint8_t> phase;      // 0..127, step 2 pi / 128
  std::vector<std::uint8_t> amplitude;  // 0..255

  std::size_t size() const noexcept { return phase.size(); }
  bool operator==(const DeviceFrame&) const = default;
};

/// Phase index round((phi mod 2 pi) / (2 pi / 128)) mod 128, amplitude index round(255 A).
/// Throws ConfigError if any |x_t| exceeds 1 + 1e-9.
DeviceFrame quantize(const Hologram& hologram, std::uint32_t sequence = 0);
ComplexVector dequantize(const DeviceFrame& frame);

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes);

std::size_t encoded_size(std::size_t transducers);
std::vector<std::uint8_t> encode_frame(const DeviceFrame& frame);
DeviceFrame decode_frame(std::span<const std::uint8_t> bytes);

enum class FrameErrorCode { BadMagic, BadVersion, Truncated, BadCrc, BadLength };
std::string_view to_string(FrameErrorCode code);

class FrameError : public ParseError {
 public:
  FrameError(FrameErrorCode code, const std::string& what) : ParseError(what), code_(code) {}
  FrameErrorCode code() const noexcept { return code_; }
  const char* kind() const noexcept override { return "frame"; }

 private:
  FrameErrorCode code_;
};

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void send(std::span<const std::uint8_t> bytes) = 0;
  virtual void flush() {}
};

/// Decodes and keeps every frame with its send time.
class LoopbackSink final : public FrameSink {
 public:
  struct Record {
    DeviceFrame frame;
    std::chrono::steady_clock::time_point time;
  };

  void send(std::span<const std::uint8_t> bytes) override;
  const std::vector<Record>& records() const noexcept { return records_; }

 private:
  std::vector<Record> records_;
};

/// Concatenates encoded frames into one file.
class FileSink final : public FrameSink {
 public:
  explicit FileSink(const std::string& path);
  ~FileSink() override;
  void send(std::span<const std::uint8_t> bytes) override;
  void flush() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds delay{50};
};

/// One datagram per frame.
class UdpSink final : public FrameSink {
 public:
  UdpSink(const std::string& host, std::uint16_t port, RetryPolicy policy = {});
  ~UdpSink() override;
  UdpSink(const UdpSink&) = delete;
  UdpSink& operator=(const UdpSink&) = delete;
  void send(std::span<const std::uint8_t> bytes) override;

 private:
  int fd_ = -1;
  RetryPolicy policy_;
};

/// "loopback", "file:<path>" or "udp:<host>:<port>".
std::unique_ptr<FrameSink> make_sink(std::string_view spec, RetryPolicy policy = {});

struct StreamReport {
  std::size_t frames = 0;
  double target_rate = 0.0;    // Hz
  double achieved_rate = 0.0;  // Hz, (n - 1) / (t_last - t_first); 0 for a single frame
  double max_jitter = 0.0;     // s, largest |send time - scheduled time|
};

struct StreamOptions {
  std::size_t queue_capacity = 64;
  /// Sleep until this long before a deadline, then spin.
  std::chrono::microseconds spin_window{200};
};

/// Sends frames in order at `rate` Hz (1..10000) from a pacing thread fed
/// through a bounded queue. The producer blocks when the queue is full.
StreamReport stream(const std::vector<DeviceFrame>& frames, FrameSink& sink, double rate,
                    const StreamOptions& options = {});

}  // namespace holo::device
