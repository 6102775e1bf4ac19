#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <optional>
#include <string>
#include <cstring>
#include <mutex>

#include "cshap/error.hpp"
#include "cshap/models.hpp"
#include "cshap/protocol.hpp"

extern char** environ;

namespace cshap::models {

namespace {

class ChildProcess {
public:
    ChildProcess(const std::string& command, std::chrono::milliseconds timeout)
        : timeout_(timeout) {
        // A dead child must surface as an error, not kill the parent.
        std::signal(SIGPIPE, SIG_IGN);

        int to_child[2];
        int from_child[2];
        if (pipe2(to_child, O_CLOEXEC) != 0) spawn_error("pipe");
        if (pipe2(from_child, O_CLOEXEC) != 0) {
            close(to_child[0]);
            close(to_child[1]);
            spawn_error("pipe");
        }
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

        // Own process group, so a hung command and anything the shell forked
        // can be killed together.
        posix_spawnattr_t attr;
        posix_spawnattr_init(&attr);
        posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
        posix_spawnattr_setpgroup(&attr, 0);

        const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
        const int rc = posix_spawn(&pid_, "/bin/sh", &actions, &attr,
                                   const_cast<char* const*>(argv), environ);
        posix_spawnattr_destroy(&attr);
        posix_spawn_file_actions_destroy(&actions);
        close(to_child[0]);
        close(from_child[1]);
        if (rc != 0) {
            close(to_child[1]);
            close(from_child[0]);
            throw Error(ErrorCode::SpawnFailure,
                        "cannot spawn '" + command + "': " + std::strerror(rc));
        }
        stdin_fd_ = to_child[1];
        stdout_fd_ = from_child[0];
    }

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    ~ChildProcess() {
        if (stdin_fd_ >= 0) {
            try {
                write_line(protocol::encode_bye());
            } catch (...) {
            }
            close(stdin_fd_);
        }
        if (stdout_fd_ >= 0) close(stdout_fd_);
        reap();
    }

    void write_line(const std::string& line) {
        std::string buf = line + '\n';
        std::size_t done = 0;
        while (done < buf.size()) {
            const auto n = ::write(stdin_fd_, buf.data() + done, buf.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::ModelFailure,
                            std::string("external model closed its input: ") + std::strerror(errno));
            }
            done += static_cast<std::size_t>(n);
        }
    }

    // Returns nullopt on EOF.
    std::optional<std::string> read_line() {
        const auto deadline = std::chrono::steady_clock::now() + timeout_;
        for (;;) {
            if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                throw Error(ErrorCode::ModelTimeout, "external model did not answer within " +
                                                         std::to_string(timeout_.count()) + " ms");
            }
            pollfd pfd{stdout_fd_, POLLIN, 0};
            const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
            if (ready < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::ModelFailure, std::string("poll: ") + std::strerror(errno));
            }
            if (ready == 0) continue;
            char chunk[65536];
            const auto n = ::read(stdout_fd_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::ModelFailure, std::string("read: ") + std::strerror(errno));
            }
            if (n == 0) return std::nullopt;
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    void reap() {
        if (pid_ <= 0) return;
        // Give the child a moment to exit on its own after "bye".
        for (int i = 0; i < 200; ++i) {
            int status = 0;
            const auto r = waitpid(pid_, &status, WNOHANG);
            if (r == pid_ || r < 0) {
                pid_ = -1;
                return;
            }
            usleep(5000);
        }
        kill(-pid_, SIGKILL);
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }

    [[noreturn]] static void spawn_error(const char* what) {
        throw Error(ErrorCode::SpawnFailure, std::string(what) + ": " + std::strerror(errno));
    }

    pid_t pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    std::string buffer_;
    std::chrono::milliseconds timeout_;
};

struct Bridge {
    ChildProcess child;
    std::size_t input_length;
    std::uint64_t next_id = 1;
    std::mutex lock;

    Bridge(const ExternalOptions& options)
        : child(options.command, options.timeout), input_length(options.input_length) {}

    std::vector<double> predict(const WindowBatch& batch) {
        if (batch.length() != input_length) {
            throw Error(ErrorCode::LengthMismatch, "external model handshake declared length " +
                                                       std::to_string(input_length));
        }
        std::lock_guard guard(lock);
        const auto id = next_id++;
        child.write_line(protocol::encode_predict(id, batch));
        auto line = child.read_line();
        if (!line) {
            throw Error(ErrorCode::ModelFailure, "external model exited during request " +
                                                     std::to_string(id));
        }
        return protocol::decode_prediction(*line, id, batch.size());
    }
};

} // namespace

ModelHandle external_model(const ExternalOptions& options) {
    auto bridge = std::make_shared<Bridge>(options);
    try {
        bridge->child.write_line(protocol::encode_hello(options.input_length));
    } catch (const Error& e) {
        throw Error(ErrorCode::SpawnFailure, "external model unavailable: " + std::string(e.what()));
    }
    const auto reply = bridge->child.read_line();
    if (!reply) {
        throw Error(ErrorCode::SpawnFailure,
                    "external model '" + options.command + "' exited before the handshake");
    }
    protocol::decode_ready(*reply);
    return ModelHandle(
        "external:" + options.command,
        [bridge](const WindowBatch& batch) { return bridge->predict(batch); }, false);
}

} // namespace cshap::models
