#pragma once

#include "privstory/review.hpp"
#include "privstory/taxonomy.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace privstory {

struct ReviewServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8377;
    /// Static UI bundle mounted at "/"; skipped when absent.
    std::optional<std::filesystem::path> ui_dir;
};

/// HTTP+JSON front end of a ReviewStore.
class ReviewServer {
  public:
    ReviewServer(ReviewStore &store, const Taxonomy &taxonomy, ReviewServerOptions opts = {});
    ~ReviewServer();
    ReviewServer(const ReviewServer &) = delete;
    ReviewServer &operator=(const ReviewServer &) = delete;

    /// Binds the listening socket and returns the bound port. Throws ReviewError on failure.
    int bind();
    /// Blocks serving requests until stop().
    void listen();
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace privstory
