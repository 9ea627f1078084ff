#include "prepaid/errors.hpp"
#include "prepaid/milp.hpp"

#include <atomic>
#include <cerrno>
#include <charconv>
#include <csignal>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace prepaid {

namespace {

std::string shell_quote(const std::string& s)
{
    std::string out = "'";
    for (char c : s)
    {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

std::string substitute(std::string text, const std::string& key, const std::string& value)
{
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
        text.replace(pos, key.size(), value);
    return text;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path unique_stem(const std::filesystem::path& dir)
{
    static std::atomic<unsigned long> counter{0};
    const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
    return dir
           / ("prepaid-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)) + "-"
              + std::to_string(now));
}

struct TempFiles
{
    std::filesystem::path lp, sol, log;
    bool keep = false;

    ~TempFiles()
    {
        if (keep)
            return;
        std::error_code ec;
        for (const auto* p : {&lp, &sol, &log})
            std::filesystem::remove(*p, ec);
    }
};

SolveStatus parse_status(const std::string& word)
{
    if (word == "optimal")
        return SolveStatus::Optimal;
    if (word == "feasible")
        return SolveStatus::Feasible;
    if (word == "infeasible")
        return SolveStatus::Infeasible;
    return SolveStatus::Error;
}

// Returns the exit status, or throws Timeout.
int run_shell(const std::string& command, const std::filesystem::path& log, std::chrono::duration<double> timeout)
{
    const std::string log_path = log.string();
    const pid_t pid = ::fork();
    if (pid < 0)
        throw MilpError(MilpErrorKind::Io, "fork failed");
    if (pid == 0)
    {
        ::setpgid(0, 0);
        const int fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd >= 0)
        {
            ::dup2(fd, STDOUT_FILENO);
            ::dup2(fd, STDERR_FILENO);
            ::close(fd);
        }
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    int status = 0;
    while (true)
    {
        const pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid)
            break;
        if (done < 0 && errno != EINTR)
            throw MilpError(MilpErrorKind::Io, "waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline)
        {
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            throw MilpError(MilpErrorKind::Timeout, "external solver exceeded its time limit");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (WIFEXITED(status))
        return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

Solution solve_external(const MilpModel& model, const std::string& command_template, const ExternalOptions& options)
{
    if (command_template.find("{lp}") == std::string::npos || command_template.find("{sol}") == std::string::npos)
        throw InvalidArgument("solver command must contain {lp} and {sol}");

    const auto dir = options.work_dir.empty() ? std::filesystem::temp_directory_path() : options.work_dir;
    const auto stem = unique_stem(dir).string();
    TempFiles files{stem + ".lp", stem + ".sol", stem + ".log", options.keep_files};
    write_lp(model, files.lp);

    std::string command = substitute(command_template, "{lp}", shell_quote(files.lp.string()));
    command = substitute(command, "{sol}", shell_quote(files.sol.string()));
    const int code = run_shell(command, files.log, options.timeout);

    Solution solution;
    if (code == 126 || code == 127)
        throw MilpError(MilpErrorKind::SolverNotFound, "solver command not runnable: " + read_file(files.log));
    if (code != 0)
    {
        solution.status = SolveStatus::Error;
        solution.messages.push_back("solver exited with code " + std::to_string(code));
        solution.messages.push_back(read_file(files.log));
        return solution;
    }

    std::ifstream in(files.sol);
    if (!in)
        throw MilpError(MilpErrorKind::SolutionParseError, "solver wrote no solution file");
    solution.status = SolveStatus::Optimal;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        std::istringstream fields(line);
        std::string name, value_text;
        if (!(fields >> name) || name.front() == '#')
            continue;
        if (!(fields >> value_text))
            throw MilpError(MilpErrorKind::SolutionParseError,
                            "line " + std::to_string(line_no) + " has no value: " + line);
        if (name == "status")
        {
            solution.status = parse_status(value_text);
            continue;
        }
        if (name == "objective")
            continue;
        double value = 0.0;
        const auto* end = value_text.data() + value_text.size();
        const auto [ptr, ec] = std::from_chars(value_text.data(), end, value);
        if (ec != std::errc{} || ptr != end)
            throw MilpError(MilpErrorKind::SolutionParseError,
                            "line " + std::to_string(line_no) + " has a bad number: " + line);
        if (!model.find(name))
        {
            solution.messages.push_back("warning: ignoring unknown variable " + name);
            continue;
        }
        solution.values[name] = value;
    }

    std::vector<double> values(model.variables().size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = solution.value_or(model.variables()[i].name, 0.0);
    solution.objective = model.evaluate(values);
    return solution;
}

}  // namespace prepaid
