#include "linred/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace linred::smt {

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : d_fd(fd) {}
    Fd(Fd&& o) noexcept : d_fd(o.release()) {}
    Fd& operator=(Fd&& o) noexcept
    {
        reset(o.release());
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return d_fd; }
    int release()
    {
        int fd = d_fd;
        d_fd = -1;
        return fd;
    }
    void reset(int fd = -1)
    {
        if (d_fd >= 0)
            ::close(d_fd);
        d_fd = fd;
    }
    explicit operator bool() const { return d_fd >= 0; }

private:
    int d_fd = -1;
};

using Clock = std::chrono::steady_clock;

// Child process speaking SMT-LIB2 on stdin/stdout. Killed on destruction if
// still running.
class SolverProcess {
public:
    explicit SolverProcess(const std::vector<std::string>& argv)
    {
        if (argv.empty())
            throw std::runtime_error("empty solver command");

        int in_pair[2], out_pipe[2], err_pipe[2], exec_pipe[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0)
            throw std::runtime_error(std::string("socketpair: ") + std::strerror(errno));
        Fd in_parent(in_pair[0]), in_child(in_pair[1]);
        if (::pipe2(out_pipe, O_CLOEXEC) != 0)
            throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
        Fd out_read(out_pipe[0]), out_write(out_pipe[1]);
        if (::pipe2(err_pipe, O_CLOEXEC) != 0)
            throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
        Fd err_read(err_pipe[0]), err_write(err_pipe[1]);
        if (::pipe2(exec_pipe, O_CLOEXEC) != 0)
            throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
        Fd exec_read(exec_pipe[0]), exec_write(exec_pipe[1]);

        std::vector<char*> args;
        for (const auto& a : argv)
            args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);

        d_pid = ::fork();
        if (d_pid < 0)
            throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
        if (d_pid == 0) {
            ::dup2(in_child.get(), STDIN_FILENO);
            ::dup2(out_write.get(), STDOUT_FILENO);
            ::dup2(err_write.get(), STDERR_FILENO);
            ::execvp(args[0], args.data());
            int err = errno;
            [[maybe_unused]] auto n = ::write(exec_write.get(), &err, sizeof err);
            ::_exit(127);
        }

        in_child.reset();
        out_write.reset();
        err_write.reset();
        exec_write.reset();

        int child_errno = 0;
        ssize_t n = ::read(exec_read.get(), &child_errno, sizeof child_errno);
        if (n == sizeof child_errno) {
            reap(true);
            throw std::runtime_error("cannot execute '" + argv[0] + "': " +
                                     std::strerror(child_errno));
        }

        d_in = std::move(in_parent);
        d_out = std::move(out_read);
        d_err = std::move(err_read);
        ::fcntl(d_in.get(), F_SETFL, O_NONBLOCK);
    }

    ~SolverProcess() { reap(true); }

    SolverProcess(const SolverProcess&) = delete;
    SolverProcess& operator=(const SolverProcess&) = delete;

    void send(std::string text) { d_pending += text; }
    void close_input() { d_close_after_send = true; }

    // Pumps I/O until `done(stdout_so_far)` holds, stdout reaches EOF, or the
    // deadline passes. Returns false on timeout.
    template <typename Pred>
    bool pump(Clock::time_point deadline, Pred done)
    {
        while (true) {
            flush_input();
            if (done(d_stdout) || (!d_out && !d_err))
                return true;

            auto now = Clock::now();
            if (now >= deadline)
                return false;
            int wait_ms = static_cast<int>(
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());

            pollfd fds[3];
            nfds_t count = 0;
            int out_idx = -1, err_idx = -1, in_idx = -1;
            if (d_out) {
                out_idx = static_cast<int>(count);
                fds[count++] = {d_out.get(), POLLIN, 0};
            }
            if (d_err) {
                err_idx = static_cast<int>(count);
                fds[count++] = {d_err.get(), POLLIN, 0};
            }
            if (d_in && !d_pending.empty()) {
                in_idx = static_cast<int>(count);
                fds[count++] = {d_in.get(), POLLOUT, 0};
            }
            int rc = ::poll(fds, count, std::max(wait_ms, 1));
            if (rc < 0 && errno != EINTR)
                throw std::runtime_error(std::string("poll: ") + std::strerror(errno));
            if (rc <= 0)
                continue;
            if (out_idx >= 0 && fds[out_idx].revents)
                drain(d_out, d_stdout);
            if (err_idx >= 0 && fds[err_idx].revents)
                drain(d_err, d_stderr);
            (void)in_idx;
        }
    }

    // Waits for exit; returns the raw wait status.
    int wait_exit(Clock::time_point deadline, bool& timed_out)
    {
        timed_out = false;
        while (true) {
            int status = 0;
            pid_t r = ::waitpid(d_pid, &status, WNOHANG);
            if (r == d_pid) {
                d_pid = -1;
                return status;
            }
            if (Clock::now() >= deadline) {
                timed_out = true;
                reap(true);
                return -1;
            }
            ::usleep(1000);
        }
    }

    const std::string& out() const { return d_stdout; }
    const std::string& err() const { return d_stderr; }

private:
    pid_t d_pid = -1;
    Fd d_in, d_out, d_err;
    std::string d_pending;
    bool d_close_after_send = false;
    std::string d_stdout, d_stderr;

    void flush_input()
    {
        while (d_in && !d_pending.empty()) {
            ssize_t n = ::send(d_in.get(), d_pending.data(), d_pending.size(),
                               MSG_NOSIGNAL | MSG_DONTWAIT);
            if (n > 0) {
                d_pending.erase(0, static_cast<std::size_t>(n));
            } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)) {
                return;
            } else {
                // Solver closed its input; remaining text is dropped.
                d_pending.clear();
                d_in.reset();
            }
        }
        if (d_in && d_pending.empty() && d_close_after_send) {
            ::shutdown(d_in.get(), SHUT_WR);
            d_in.reset();
        }
    }

    static void drain(Fd& fd, std::string& sink)
    {
        char buf[8192];
        ssize_t n = ::read(fd.get(), buf, sizeof buf);
        if (n > 0)
            sink.append(buf, static_cast<std::size_t>(n));
        else if (n == 0 || (errno != EAGAIN && errno != EINTR))
            fd.reset();
    }

    void reap(bool kill_first)
    {
        if (d_pid <= 0)
            return;
        if (kill_first)
            ::kill(d_pid, SIGKILL);
        int status = 0;
        while (::waitpid(d_pid, &status, 0) < 0 && errno == EINTR) {
        }
        d_pid = -1;
    }
};

// First complete top-level token of the response, if any.
std::optional<std::string> first_response(const std::string& out)
{
    std::size_t nl = out.find('\n');
    if (nl == std::string::npos)
        return std::nullopt;
    std::size_t b = out.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return std::nullopt;
    if (out[b] != '(') {
        std::size_t e = out.find_first_of(" \t\r\n", b);
        if (e == std::string::npos)
            return std::nullopt;
        return out.substr(b, e - b);
    }
    // An s-expression (typically an error); wait until it is balanced.
    int depth = 0;
    for (std::size_t i = b; i < out.size(); ++i) {
        if (out[i] == '(')
            ++depth;
        else if (out[i] == ')' && --depth == 0)
            return out.substr(b, i - b + 1);
    }
    return std::nullopt;
}

std::string transcript(const SolverProcess& p)
{
    std::string t = "stdout: " + p.out();
    if (!p.err().empty())
        t += "\nstderr: " + p.err();
    return t;
}

} // namespace

Verdict run_solver(const Script& script, const SolverConfig& config)
{
    Script local = script;
    if (config.logic_override && !local.logic_override())
        local.set_logic(*config.logic_override);

    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(config.timeout_s));
    try {
        SolverProcess proc(config.argv);
        proc.send(serialize_query(local));

        std::optional<std::string> head;
        bool ok = proc.pump(deadline, [&](const std::string& out) {
            head = first_response(out);
            return head.has_value();
        });
        if (!ok)
            return Unknown{"timeout"};
        if (!head) {
            bool late = false;
            int status = proc.wait_exit(deadline, late);
            return SolverFailure{"solver produced no verdict (wait status " +
                                 std::to_string(status) + ")\n" + transcript(proc)};
        }

        std::size_t verdict_end = proc.out().find(*head) + head->size();
        bool sat = *head == "sat";
        std::string request = sat ? serialize_model_request(local) : std::string();
        proc.send(request + "(exit)\n");
        proc.close_input();
        if (!proc.pump(deadline, [](const std::string&) { return false; }))
            return Unknown{"timeout"};

        bool timed_out = false;
        int status = proc.wait_exit(deadline, timed_out);
        if (timed_out)
            return Unknown{"timeout"};
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
            return SolverFailure{"solver exited abnormally (wait status " +
                                 std::to_string(status) + ")\n" + transcript(proc)};

        if (*head == "unsat")
            return Unsat{};
        if (*head == "unknown")
            return Unknown{"solver returned unknown"};
        if (!sat)
            return SolverFailure{"unexpected solver response '" + *head + "'\n" + transcript(proc)};

        Sat result;
        if (!request.empty()) {
            try {
                result.model = parse_get_value(std::string_view(proc.out()).substr(verdict_end));
            } catch (const SmtParseError& e) {
                return SolverFailure{std::string("cannot parse model: ") + e.what() + "\n" +
                                     transcript(proc)};
            }
            for (const auto& d : local.declarations())
                if (d.sort != Sort::Bool && !result.model.count(d.name))
                    return SolverFailure{"model does not assign '" + d.name + "'\n" +
                                         transcript(proc)};
        }
        return result;
    } catch (const std::exception& e) {
        return SolverFailure{e.what()};
    }
}

} // namespace linred::smt
