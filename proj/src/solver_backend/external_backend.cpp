#include "streamforge/solver_backend.hpp"

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

extern char** environ;

namespace streamforge::solver {

namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
    int fd[2] = {-1, -1};

    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) fd[0] = fd[1] = -1;
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;

    bool ok() const { return fd[0] >= 0 && fd[1] >= 0; }
    void close_read() {
        if (fd[0] >= 0) ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write() {
        if (fd[1] >= 0) ::close(fd[1]);
        fd[1] = -1;
    }
};

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

SolveOutcome error(std::string diagnostic, double seconds = 0.0) {
    return SolveOutcome{SolveStatus::Error, seconds, std::move(diagnostic)};
}

std::string excerpt(const std::string& text, std::size_t limit = 2000) {
    if (text.size() <= limit) return text;
    return text.substr(0, limit) + "...";
}

// Collects every remaining member of the child's process group. Orphaned
// grandchildren are reparented to us (we are a subreaper), so this blocks
// only until the group is gone.
void reap_group(pid_t pgid) {
    for (;;) {
        int st = 0;
        pid_t r = ::waitpid(-pgid, &st, 0);
        if (r > 0) continue;
        if (r < 0 && errno == EINTR) continue;
        break;
    }
}

}  // namespace

ExternalBackend::ExternalBackend(ExternalOptions options) : options_(std::move(options)) {
    std::signal(SIGPIPE, SIG_IGN);
    ::prctl(PR_SET_CHILD_SUBREAPER, 1);
}

std::string ExternalBackend::name() const {
    std::string out = "external:" + options_.path;
    for (const auto& arg : options_.args) out += " " + arg;
    return out;
}

SolveOutcome ExternalBackend::solve(std::string_view program, double timeout_seconds) {
    if (timeout_seconds <= 0) return error("timeout must be positive");
    if (::access(options_.path.c_str(), X_OK) != 0) {
        return error("cannot execute solver '" + options_.path + "': " + std::strerror(errno));
    }

    Pipe in, out, err;
    if (!in.ok() || !out.ok() || !err.ok()) return error("cannot create pipes");

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err.fd[1], STDERR_FILENO);

    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGDEF);
    posix_spawnattr_setpgroup(&attr, 0);
    sigset_t defaults;
    sigemptyset(&defaults);
    sigaddset(&defaults, SIGPIPE);
    posix_spawnattr_setsigdefault(&attr, &defaults);

    std::vector<std::string> argv_storage;
    argv_storage.push_back(options_.path);
    argv_storage.insert(argv_storage.end(), options_.args.begin(), options_.args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    argv.push_back(nullptr);

    const auto start = Clock::now();
    pid_t pid = -1;
    int rc = ::posix_spawn(&pid, options_.path.c_str(), &actions, &attr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0) return error("cannot start solver '" + options_.path + "': " + std::strerror(rc));
    last_pid_ = pid;

    in.close_read();
    out.close_write();
    err.close_write();
    set_nonblocking(in.fd[1]);
    set_nonblocking(out.fd[0]);
    set_nonblocking(err.fd[0]);

    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_seconds));
    std::string stdout_text, stderr_text;
    std::size_t written = 0;
    if (program.empty()) in.close_write();

    bool timed_out = false;
    while (out.fd[0] >= 0 || err.fd[0] >= 0) {
        auto now = Clock::now();
        if (now >= deadline) {
            timed_out = true;
            break;
        }
        std::vector<pollfd> fds;
        if (in.fd[1] >= 0) fds.push_back(pollfd{in.fd[1], POLLOUT, 0});
        if (out.fd[0] >= 0) fds.push_back(pollfd{out.fd[0], POLLIN, 0});
        if (err.fd[0] >= 0) fds.push_back(pollfd{err.fd[0], POLLIN, 0});
        auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
        int ready = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(wait_ms, 50)));
        if (ready < 0 && errno != EINTR) break;
        for (const auto& p : fds) {
            if (p.revents == 0) continue;
            if (p.fd == in.fd[1]) {
                ssize_t n = ::write(p.fd, program.data() + written, program.size() - written);
                if (n > 0) written += static_cast<std::size_t>(n);
                if (n < 0 && errno != EAGAIN && errno != EINTR) in.close_write();
                if (written == program.size()) in.close_write();
                continue;
            }
            char buf[8192];
            ssize_t n = ::read(p.fd, buf, sizeof buf);
            std::string& sink = p.fd == out.fd[0] ? stdout_text : stderr_text;
            if (n > 0) {
                sink.append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
                if (p.fd == out.fd[0]) out.close_read();
                else err.close_read();
            }
        }
    }
    in.close_write();

    int status = 0;
    rusage usage{};
    if (!timed_out) {
        // Output closed; wait for exit, still honouring the deadline.
        for (;;) {
            pid_t r = ::wait4(pid, &status, WNOHANG, &usage);
            if (r == pid) break;
            if (r < 0 && errno != EINTR) break;
            if (Clock::now() >= deadline) {
                timed_out = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
    }

    if (timed_out) {
        ::kill(-pid, SIGTERM);
        const auto grace_end = Clock::now() + options_.kill_grace;
        bool exited = false;
        while (Clock::now() < grace_end) {
            pid_t r = ::waitpid(pid, &status, WNOHANG);
            if (r == pid) {
                exited = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        ::kill(-pid, SIGKILL);
        if (!exited) ::waitpid(pid, &status, 0);
        reap_group(pid);
        return SolveOutcome{SolveStatus::Timeout, timeout_seconds, {}};
    }

    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    ::kill(-pid, SIGKILL);   // stray descendants must not outlive the run
    reap_group(pid);
    double seconds = wall;
    if (options_.cpu_time) {
        seconds = static_cast<double>(usage.ru_utime.tv_sec + usage.ru_stime.tv_sec) +
                  static_cast<double>(usage.ru_utime.tv_usec + usage.ru_stime.tv_usec) * 1e-6;
    }

    if (WIFSIGNALED(status)) {
        return error("solver terminated by signal " + std::to_string(WTERMSIG(status)) + "\n" + excerpt(stderr_text), seconds);
    }
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    SolveStatus parsed = parse_external_output(stdout_text, code);
    if (parsed == SolveStatus::Error) {
        std::string diag = "solver exited with code " + std::to_string(code);
        if (!stderr_text.empty()) diag += "\n" + excerpt(stderr_text);
        else if (!stdout_text.empty()) diag += "\n" + excerpt(stdout_text);
        return error(diag, seconds);
    }
    return SolveOutcome{parsed, seconds, {}};
}

std::optional<std::string> solver_from_environment() {
    const char* p = std::getenv("STREAMFORGE_SOLVER");
    if (!p || !*p) return std::nullopt;
    return std::string(p);
}

}  // namespace streamforge::solver
