#include "costar/backend.hpp"
#include "costar/protocol.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <pthread.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace costar {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

std::string errno_message(const char* what) {
    return std::string(what) + ": " + std::strerror(errno);
}

} // namespace

ExternalBackend::ExternalBackend(const std::string& command) {
    int in_pipe[2];  // harness -> child stdin
    int out_pipe[2]; // child stdout -> harness
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
        throw BackendError(errno_message("pipe"));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw BackendError(errno_message("pipe"));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::string shell = "/bin/sh";
    std::string flag = "-c";
    std::string cmd = command;
    char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    if (rc != 0) {
        close_fd(to_child_);
        close_fd(from_child_);
        throw BackendError(std::string("cannot start backend: ") + std::strerror(rc));
    }
    pid_ = pid;

    try {
        const std::string line = read_line();
        descriptor_ = protocol::descriptor_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
        close_fd(to_child_);
        close_fd(from_child_);
        ::waitpid(pid_, nullptr, 0);
        pid_ = -1;
        throw BackendError(std::string("bad handshake from '") + command + "': " + e.what());
    }
}

ExternalBackend::~ExternalBackend() {
    close_fd(to_child_);
    close_fd(from_child_);
    if (pid_ > 0) {
        ::waitpid(pid_, nullptr, 0);
    }
}

std::string ExternalBackend::read_line() {
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n < 0) {
            throw BackendError(errno_message("read from backend"));
        }
        if (n == 0) {
            throw BackendError("backend closed its output");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void ExternalBackend::write_line(const std::string& line) {
    // Block SIGPIPE for this thread so a dead child surfaces as EPIPE.
    sigset_t pipe_set;
    sigset_t old_set;
    sigemptyset(&pipe_set);
    sigaddset(&pipe_set, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);

    const std::string data = line + "\n";
    std::size_t written = 0;
    int error = 0;
    while (written < data.size()) {
        const ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            error = errno;
            break;
        }
        written += static_cast<std::size_t>(n);
    }
    if (error == EPIPE) {
        const timespec zero{0, 0};
        sigtimedwait(&pipe_set, nullptr, &zero);
    }
    pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
    if (error != 0) {
        throw BackendError(std::string("write to backend: ") + std::strerror(error));
    }
}

GenerationResult ExternalBackend::generate(const GenerationRequest& req) {
    check_prefix(req.prefix);
    std::lock_guard lock(mutex_);
    if (to_child_ < 0) {
        throw BackendError("backend is closed");
    }
    write_line(protocol::request_to_json(req).dump());
    GenerationResult result;
    try {
        result = protocol::response_from_json(nlohmann::json::parse(read_line()));
    } catch (const BackendError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(std::string("malformed response: ") + e.what());
    }
    normalize_result(result, req.num_candidates);
    return result;
}

} // namespace costar
