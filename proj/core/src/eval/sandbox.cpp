#include "intentfill/eval/sandbox.hpp"

#include <fcntl.h>
#include <sched.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "intentfill/jsonl.hpp"
#include "intentfill/log.hpp"
#include "intentfill/parallel.hpp"
#include "intentfill/python/syntax_tree.hpp"
#include "intentfill/text.hpp"

namespace intentfill::eval {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- benchmark records ---------------------------------------------------

void to_json(json& j, const BenchmarkInstance& b) {
    j = b.instance;
    j["oracle_docstring"] = b.oracle_docstring;
    j["test_command"] = b.test_command;
    j["workdir"] = b.workdir.string();
    j["timeout_s"] = b.timeout_s;
}

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

double positive_timeout(const json& j, const char* key) {
    double t = j.value(key, 30.0);
    if (!(t > 0) || !std::isfinite(t)) throw Error(std::string(key) + " must be positive");
    return t;
}

// Pulls the named top-level function out of workdir/rel into an instance.
miner::FunctionInstance instance_from_file(const fs::path& workdir, const std::string& rel, const std::string& name,
                                           const std::string& id) {
    miner::SourceFile file;
    file.repo_id = workdir.filename().string();
    file.path = rel;
    file.text = read_file(workdir / rel);
    auto tree = py::parse_module(file.text);
    for (const auto& fn : miner::extract_functions(tree)) {
        if (fn.name != name) continue;
        auto inst = miner::make_instance(file, fn, tree);
        if (!id.empty()) inst.id = id;
        return inst;
    }
    throw Error("function '" + name + "' not found in " + rel);
}

std::string last_segment(const std::string& dotted) {
    auto pos = dotted.find_last_of('.');
    return pos == std::string::npos ? dotted : dotted.substr(pos + 1);
}

}  // namespace

BenchmarkInstance benchmark_from_json(const json& j, const fs::path& base) {
    BenchmarkInstance b;
    b.instance = j.get<miner::FunctionInstance>();
    b.oracle_docstring = j.at("oracle_docstring").get<std::string>();
    b.test_command = j.at("test_command").get<std::string>();
    b.workdir = resolve(j.at("workdir").get<std::string>(), base);
    b.timeout_s = positive_timeout(j, "timeout_s");
    return b;
}

BenchmarkInstance from_deveval(const json& j, const fs::path& base) {
    BenchmarkInstance b;
    b.workdir = resolve(j.at("project_path").get<std::string>(), base);
    std::string ns = j.at("namespace").get<std::string>();
    std::string rel = j.at("completion_path").get<std::string>();
    b.instance = instance_from_file(b.workdir, rel, last_segment(ns), ns);
    const json& req = j.at("requirement");
    std::string doc = req.value("Functionality", std::string{});
    std::string args = req.value("Arguments", std::string{});
    b.oracle_docstring = args.empty() ? doc : doc + "\n" + args;
    std::vector<std::string> tests = j.value("tests", std::vector<std::string>{});
    b.test_command = j.value("test_command", "python -m pytest -q " + text::join(tests, " "));
    b.timeout_s = positive_timeout(j, "timeout_s");
    return b;
}

BenchmarkInstance from_complexcodeeval(const json& j, const fs::path& base) {
    BenchmarkInstance b;
    b.workdir = resolve(j.at("repo_path").get<std::string>(), base);
    std::string rel = j.at("file_path").get<std::string>();
    std::string name = j.at("function_name").get<std::string>();
    std::string id = j.value("id", rel + "::" + name);
    b.instance = instance_from_file(b.workdir, rel, name, id);
    if (auto it = j.find("function_body"); it != j.end()) b.instance.body = it->get<std::string>();
    if (auto it = j.find("function_signature"); it != j.end()) b.instance.signature = it->get<std::string>();
    b.oracle_docstring = j.at("docstring").get<std::string>();
    b.test_command = j.at("test_cmd").get<std::string>();
    b.timeout_s = positive_timeout(j, "timeout_s");
    return b;
}

std::vector<BenchmarkInstance> load_benchmark(const fs::path& path) {
    fs::path base = path.parent_path();
    return read_records<BenchmarkInstance>(path, [&](const json& j) {
        if (j.contains("namespace") && j.contains("completion_path")) return from_deveval(j, base);
        if (j.contains("test_cmd") && j.contains("repo_path")) return from_complexcodeeval(j, base);
        return benchmark_from_json(j, base);
    });
}

// ---- outcomes ------------------------------------------------------------

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Timeout: return "timeout";
    case Outcome::Error: return "error";
    case Outcome::Skip: return "skip";
    }
    return "error";
}

Outcome parse_outcome(std::string_view s) {
    for (Outcome o : {Outcome::Pass, Outcome::Fail, Outcome::Timeout, Outcome::Error, Outcome::Skip}) {
        if (to_string(o) == s) return o;
    }
    throw Error("unknown outcome '" + std::string(s) + "'");
}

// ---- splicing ------------------------------------------------------------

std::string splice_body(std::string_view source, std::string_view name, std::string_view body) {
    std::vector<miner::RawFunction> fns;
    try {
        fns = miner::extract_functions(py::parse_module(std::string(source)));
    } catch (const py::ParseError& e) {
        throw SandboxSetupError(std::string("target file does not parse: ") + e.what());
    }
    for (const auto& fn : fns) {
        if (fn.name != name) continue;
        std::string b(body);
        // A body handed over without indentation gets one level.
        auto lines = text::split_lines(b);
        auto first = std::find_if(lines.begin(), lines.end(), [](auto l) { return !text::trim(l).empty(); });
        if (first != lines.end() && first->front() != ' ' && first->front() != '\t') {
            std::string indented;
            for (auto l : lines) {
                if (!text::trim(l).empty()) indented += "    ";
                indented.append(l);
                indented.push_back('\n');
            }
            b = std::move(indented);
        }
        if (b.empty() || text::trim(b).empty()) b = "    pass\n";
        if (b.back() != '\n') b.push_back('\n');
        std::string out(source.substr(0, fn.body_begin));
        out += b;
        out.append(source.substr(fn.body_end));
        return out;
    }
    throw SandboxSetupError("function '" + std::string(name) + "' not found");
}

// ---- execution -----------------------------------------------------------

namespace {

fs::path make_temp_dir(const fs::path& root) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    for (int attempt = 0; attempt < 16; ++attempt) {
        fs::path p = root / ("intentfill-sbx-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                             text::hex64((std::uint64_t(rd()) << 32) | rd()).substr(0, 8));
        std::error_code ec;
        if (fs::create_directory(p, ec)) return p;
    }
    throw SandboxSetupError("cannot create a sandbox directory under " + root.string());
}

// Removes the directory when the run ends, whatever happens.
struct DirGuard {
    fs::path dir;
    ~DirGuard() {
        if (dir.empty()) return;
        std::error_code ec;
        // Tests may leave read-only files behind; make them removable first.
        for (auto it = fs::recursive_directory_iterator(dir, fs::directory_options::skip_permission_denied, ec);
             !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
            std::error_code pec;
            if (it->is_directory(pec) && !it->is_symlink(pec)) {
                fs::permissions(it->path(), fs::perms::owner_all, fs::perm_options::add, pec);
            }
        }
        fs::remove_all(dir, ec);
        if (ec) log::warn("could not remove sandbox " + dir.string() + ": " + ec.message());
    }
};

std::string read_tail(const fs::path& p, std::size_t limit) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    in.seekg(0, std::ios::end);
    auto size = static_cast<std::size_t>(in.tellg());
    std::size_t start = size > limit ? size - limit : 0;
    in.seekg(static_cast<std::streamoff>(start));
    std::string out(size - start, '\0');
    in.read(out.data(), static_cast<std::streamsize>(out.size()));
    return out;
}

[[noreturn]] void run_child(const fs::path& dir, const fs::path& log_path, const std::string& command, double timeout_s,
                            const SandboxOptions& opts) {
    ::setpgid(0, 0);
    if (opts.isolate_network) {
        // Without privileges this fails and the run proceeds with the host network.
        (void)::unshare(CLONE_NEWNET);
    }
    rlimit cpu{};
    cpu.rlim_cur = cpu.rlim_max = static_cast<rlim_t>(std::ceil(timeout_s)) + 1;
    ::setrlimit(RLIMIT_CPU, &cpu);
    if (opts.memory_limit_mb > 0) {
        rlimit mem{};
        mem.rlim_cur = mem.rlim_max = static_cast<rlim_t>(opts.memory_limit_mb) * 1024 * 1024;
        ::setrlimit(RLIMIT_AS, &mem);
    }
    rlimit core{};
    ::setrlimit(RLIMIT_CORE, &core);
    if (::chdir(dir.c_str()) != 0) ::_exit(126);
    int fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (fd >= 0) {
        ::dup2(fd, STDOUT_FILENO);
        ::dup2(fd, STDERR_FILENO);
        ::close(fd);
    }
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) {
        ::dup2(devnull, STDIN_FILENO);
        ::close(devnull);
    }
    ::setenv("HOME", dir.c_str(), 1);
    ::setenv("TMPDIR", dir.c_str(), 1);
    ::setenv("PYTHONDONTWRITEBYTECODE", "1", 1);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
}

}  // namespace

ExecResult execute_tests(const BenchmarkInstance& inst, std::string_view body, const SandboxOptions& opts) {
    ExecResult res;
    DirGuard guard;
    fs::path run_dir;
    fs::path log_path;
    try {
        if (inst.test_command.empty()) throw SandboxSetupError("empty test command");
        if (!fs::is_directory(inst.workdir)) throw SandboxSetupError("workdir missing: " + inst.workdir.string());
        fs::path root = opts.temp_root.empty() ? fs::temp_directory_path() : opts.temp_root;
        guard.dir = make_temp_dir(root);
        run_dir = guard.dir / "work";
        std::error_code ec;
        fs::copy(inst.workdir, run_dir, fs::copy_options::recursive | fs::copy_options::copy_symlinks, ec);
        if (ec) throw SandboxSetupError("copy failed: " + ec.message());
        fs::path target = run_dir / inst.instance.file_name;
        if (!fs::is_regular_file(target)) throw SandboxSetupError("target file missing: " + inst.instance.file_name);
        write_file(target, splice_body(read_file(target), inst.instance.function_name, body));
        log_path = guard.dir / "output.log";
    } catch (const SandboxSetupError& e) {
        res.outcome = Outcome::Skip;
        res.detail = e.what();
        return res;
    } catch (const std::exception& e) {
        res.outcome = Outcome::Skip;
        res.detail = std::string("sandbox setup: ") + e.what();
        return res;
    }

    auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        res.outcome = Outcome::Skip;
        res.detail = std::string("fork failed: ") + std::strerror(errno);
        return res;
    }
    if (pid == 0) run_child(run_dir, log_path, inst.test_command, inst.timeout_s, opts);
    ::setpgid(pid, pid);  // also done in the child; whichever runs first wins

    auto deadline = start + std::chrono::duration<double>(inst.timeout_s);
    int status = 0;
    bool timed_out = false;
    auto pause = std::chrono::milliseconds(1);
    for (;;) {
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0 && errno != EINTR) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
            ::killpg(pid, SIGKILL);
            while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
            }
            break;
        }
        std::this_thread::sleep_for(pause);
        pause = std::min(pause * 2, std::chrono::milliseconds(20));
    }
    // Stray descendants of a finished run go down with the group.
    ::killpg(pid, SIGKILL);
    res.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.output_tail = read_tail(log_path, opts.output_limit);

    if (timed_out) {
        res.outcome = Outcome::Timeout;
        res.signal = SIGKILL;
        res.detail = "killed after " + std::to_string(inst.timeout_s) + " s";
    } else if (WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
        if (res.exit_code == 0) {
            res.outcome = Outcome::Pass;
        } else if (res.exit_code == 126 || res.exit_code == 127) {
            res.outcome = Outcome::Error;
            res.detail = "test command could not be run";
        } else {
            res.outcome = Outcome::Fail;
        }
    } else if (WIFSIGNALED(status)) {
        res.signal = WTERMSIG(status);
        res.outcome = res.signal == SIGXCPU ? Outcome::Timeout : Outcome::Error;
        res.detail = std::string("terminated by signal ") + std::to_string(res.signal);
    }
    return res;
}

std::vector<BenchmarkInstance> filter_passing(const std::vector<BenchmarkInstance>& bench, std::size_t workers,
                                              std::vector<std::string>& excluded, const SandboxOptions& opts) {
    std::vector<Outcome> outcomes(bench.size());
    parallel_for(bench.size(), workers,
                 [&](std::size_t i) { outcomes[i] = execute_tests(bench[i], bench[i].instance.body, opts).outcome; });
    std::vector<BenchmarkInstance> kept;
    for (std::size_t i = 0; i < bench.size(); ++i) {
        if (outcomes[i] == Outcome::Pass) {
            kept.push_back(bench[i]);
        } else {
            excluded.push_back(bench[i].instance.id + ": " + std::string(to_string(outcomes[i])));
        }
    }
    return kept;
}

}  // namespace intentfill::eval
