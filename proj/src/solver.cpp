#include "smtbridge/solver.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "smtbridge/error.hpp"
#include "smtbridge/sexpr.hpp"

namespace smtbridge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

std::vector<std::string> split_command(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  bool in_word = false, quoted = false;
  for (char c : text) {
    if (c == '"') {
      quoted = !quoted;
      in_word = true;
    } else if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
      if (in_word) out.push_back(cur);
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (quoted) throw Error(ErrorKind::kConfig, "unterminated quote in command: " + std::string(text));
  if (in_word) out.push_back(cur);
  return out;
}

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

SolverConfig parse_solver_config(std::string_view text, SolverConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    size_t eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(content.substr(0, eq));
    std::string value = trim(content.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"' && key != "args") {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "solver") {
      if (value.empty()) throw Error(ErrorKind::kConfig, "line " + std::to_string(lineno) + ": empty solver");
      if (base.command.empty()) base.command.push_back(value);
      else base.command[0] = value;
    } else if (key == "args") {
      std::string head = base.command.empty() ? "z3" : base.command[0];
      base.command = {head};
      for (auto& a : split_command(value)) base.command.push_back(std::move(a));
    } else if (key == "timeout") {
      char* end = nullptr;
      double t = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0' || !(t > 0)) {
        throw Error(ErrorKind::kConfig, "line " + std::to_string(lineno) + ": timeout must be a positive number");
      }
      base.timeout_seconds = t;
    } else if (key == "working_dir") {
      base.working_dir = value;
    } else {
      throw Error(ErrorKind::kConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

SolverConfig load_solver_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    SolverConfig cfg = parse_solver_config(buf.str());
    cfg.origin = path.string();
    return cfg;
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

std::optional<fs::path> find_config_file() {
  std::error_code ec;
  if (fs::is_regular_file("bridge.conf", ec)) return fs::absolute("bridge.conf");
  fs::path user;
  if (const char* xdg = std::getenv("XDG_CONFIG_HOME"); xdg && *xdg) {
    user = fs::path(xdg) / "smtbridge" / "bridge.conf";
  } else if (const char* home = std::getenv("HOME"); home && *home) {
    user = fs::path(home) / ".config" / "smtbridge" / "bridge.conf";
  }
  if (!user.empty() && fs::is_regular_file(user, ec)) return user;
  return std::nullopt;
}

SolverConfig resolve_solver_config() {
  if (auto path = find_config_file()) return load_solver_config(*path);
  return {};
}

// ---------------------------------------------------------------------------
// Models

std::string ModelValue::str() const {
  switch (kind) {
    case Kind::kRational: return rational.get_str();
    case Kind::kBoolean: return boolean ? "t" : "nil";
    case Kind::kAlgebraic:
    case Kind::kOpaque: return text;
  }
  return text;
}

namespace {

bool parse_decimal(const std::string& s, mpq_class& out) {
  size_t dot = s.find('.');
  std::string whole = s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  auto digits = [](const std::string& d) {
    return std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (whole.empty() || !digits(whole) || !digits(frac)) return false;
  if (dot != std::string::npos && frac.empty()) return false;
  mpz_class num(whole + frac, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  out = mpq_class(num, den);
  out.canonicalize();
  return true;
}

// Constant rational expression built from numerals, -, /, + and *.
bool eval_constant(const SExpr& e, mpq_class& out) {
  if (e.is_atom()) return parse_decimal(e.text, out);
  if (!e.is_list() || e.items.empty() || !e.items[0].is_atom()) return false;
  const std::string& op = e.items[0].text;
  std::vector<mpq_class> vals;
  for (size_t i = 1; i < e.items.size(); ++i) {
    mpq_class v;
    if (!eval_constant(e.items[i], v)) return false;
    vals.push_back(v);
  }
  if (vals.empty()) return false;
  if (op == "-") {
    if (vals.size() == 1) {
      out = -vals[0];
      return true;
    }
    out = vals[0];
    for (size_t i = 1; i < vals.size(); ++i) out -= vals[i];
    return true;
  }
  if (op == "+" || op == "*") {
    out = vals[0];
    for (size_t i = 1; i < vals.size(); ++i) out = op == "+" ? mpq_class(out + vals[i]) : mpq_class(out * vals[i]);
    return true;
  }
  if (op == "/" && vals.size() >= 2) {
    out = vals[0];
    for (size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] == 0) return false;
      out /= vals[i];
    }
    return true;
  }
  return false;
}

std::string unbar(const std::string& s) {
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

Model model_from_sexpr(const SExpr& form) {
  if (!form.is_list()) throw Error(ErrorKind::kSolver, "model is not a list: " + form.str());
  Model model;
  size_t start = !form.items.empty() && form.items[0].is_atom("model") ? 1 : 0;
  for (size_t i = start; i < form.items.size(); ++i) {
    const SExpr& d = form.items[i];
    if (!d.is_list() || d.items.size() != 5 || !d.items[0].is_atom("define-fun") || !d.items[1].is_atom() ||
        !d.items[2].is_list()) {
      throw Error(ErrorKind::kSolver, "unexpected model entry: " + d.str());
    }
    ModelValue v;
    const SExpr& value = d.items[4];
    const std::string sort = d.items[3].str();
    if (!d.items[2].items.empty()) {
      v.kind = ModelValue::Kind::kOpaque;
      v.text = "(lambda " + d.items[2].str() + " " + value.str() + ")";
    } else if (sort == "Bool" && (value.is_atom("true") || value.is_atom("false"))) {
      v.kind = ModelValue::Kind::kBoolean;
      v.boolean = value.is_atom("true");
    } else if (eval_constant(value, v.rational)) {
      v.kind = ModelValue::Kind::kRational;
    } else if (value.is_list() && !value.items.empty() && value.items[0].is_atom("root-obj")) {
      v.kind = ModelValue::Kind::kAlgebraic;
      v.text = value.str();
    } else {
      v.kind = ModelValue::Kind::kOpaque;
      v.text = value.str();
    }
    model[unbar(d.items[1].text)] = std::move(v);
  }
  return model;
}

std::vector<SExpr> read_solver_text(std::string_view text) {
  ReadOptions opt;
  opt.fold_case = false;
  opt.block_comments = false;
  return read_sexprs(text, opt);
}

}  // namespace

Model parse_model(std::string_view text) {
  std::vector<SExpr> forms;
  try {
    forms = read_solver_text(text);
  } catch (const Error& e) {
    throw Error(ErrorKind::kSolver, "cannot parse model: " + e.message());
  }
  if (forms.size() != 1) throw Error(ErrorKind::kSolver, "expected exactly one model form");
  return model_from_sexpr(forms[0]);
}

std::string_view to_string(SolverVerdict::Kind k) {
  switch (k) {
    case SolverVerdict::Kind::kUnsat: return "unsat";
    case SolverVerdict::Kind::kSat: return "sat";
    case SolverVerdict::Kind::kUnknown: return "unknown";
    case SolverVerdict::Kind::kError: return "error";
  }
  return "";
}

SolverVerdict interpret_solver_output(const std::string& output) {
  SolverVerdict v;
  v.raw_output = output;
  std::vector<SExpr> forms;
  try {
    forms = read_solver_text(output);
  } catch (const Error& e) {
    v.kind = SolverVerdict::Kind::kError;
    v.message = "unreadable solver output (" + e.message() + "): " + output;
    return v;
  }
  size_t i = 0;
  for (; i < forms.size(); ++i) {
    const SExpr& f = forms[i];
    if (f.is_atom("unsat") || f.is_atom("sat") || f.is_atom("unknown")) break;
    if (f.is_atom("success")) continue;
    v.kind = SolverVerdict::Kind::kError;
    if (f.is_list() && !f.items.empty() && f.items[0].is_atom("error")) {
      v.message = f.items.size() > 1 ? f.items[1].text : f.str();
    } else {
      v.message = "unexpected solver output: " + output;
    }
    return v;
  }
  if (i == forms.size()) {
    v.kind = SolverVerdict::Kind::kError;
    v.message = output.empty() ? "solver produced no output" : "no verdict in solver output: " + output;
    return v;
  }
  const SExpr& verdict = forms[i++];
  if (verdict.is_atom("sat")) {
    v.kind = SolverVerdict::Kind::kSat;
    if (i < forms.size() && forms[i].is_list() && !(forms[i].items.size() > 0 && forms[i].items[0].is_atom("error"))) {
      try {
        v.model = model_from_sexpr(forms[i]);
      } catch (const Error& e) {
        v.kind = SolverVerdict::Kind::kError;
        v.message = e.message();
        return v;
      }
      ++i;
    }
  } else if (verdict.is_atom("unsat")) {
    v.kind = SolverVerdict::Kind::kUnsat;
  } else {
    v.kind = SolverVerdict::Kind::kUnknown;
  }
  for (; i < forms.size(); ++i) v.log.push_back(forms[i].str());
  return v;
}

// ---------------------------------------------------------------------------
// Subprocess

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { signal(SIGPIPE, SIG_IGN); });
}

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input, double timeout_seconds,
                          const fs::path& working_dir) {
  ProcessResult result;
  if (argv.empty()) {
    result.error = "empty command";
    return result;
  }
  ignore_sigpipe();

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  std::string cwd = working_dir.string();

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) {
    result.error = std::strerror(errno);
    return result;
  }
  if (pipe2(out_pipe, O_CLOEXEC) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0) {
    result.error = std::strerror(errno);
    close(in_pipe[0]);
    close(in_pipe[1]);
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) {
    result.error = std::strerror(errno);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) close(fd);
    return result;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);
    if (!cwd.empty() && chdir(cwd.c_str()) != 0) {
      int e = errno;
      (void)!write(err_pipe[1], &e, sizeof e);
      _exit(127);
    }
    execvp(cargv[0], cargv.data());
    int e = errno;
    (void)!write(err_pipe[1], &e, sizeof e);
    _exit(127);
  }
  setpgid(pid, pid);
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  int exec_errno = 0;
  ssize_t got = read(err_pipe[0], &exec_errno, sizeof exec_errno);
  close(err_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    waitpid(pid, nullptr, 0);
    result.error = "cannot run '" + argv[0] + "': " + std::strerror(exec_errno);
    return result;
  }
  result.started = true;

  set_nonblocking(in_pipe[1]);
  set_nonblocking(out_pipe[0]);
  int in_fd = in_pipe[1];
  int out_fd = out_pipe[0];
  size_t written = 0;
  if (input.empty()) {
    close(in_fd);
    in_fd = -1;
  }

  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  char buf[65536];
  while (out_fd >= 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd fds[2];
    int n = 0;
    fds[n++] = {out_fd, POLLIN, 0};
    if (in_fd >= 0) fds[n++] = {in_fd, POLLOUT, 0};
    int rc = poll(fds, n, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t r = read(out_fd, buf, sizeof buf);
      if (r > 0) {
        result.output.append(buf, r);
      } else if (r == 0 || (errno != EAGAIN && errno != EINTR)) {
        close(out_fd);
        out_fd = -1;
      }
    }
    if (n > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = write(in_fd, input.data() + written, input.size() - written);
      if (w > 0) written += w;
      if ((w < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) {
        close(in_fd);
        in_fd = -1;
      }
    }
  }
  if (in_fd >= 0) close(in_fd);
  if (out_fd >= 0) close(out_fd);

  int status = 0;
  if (!result.timed_out) {
    // Output is closed; give the process until the deadline to exit.
    while (true) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (w < 0) {
        status = -1;
        break;
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        break;
      }
      usleep(2000);
    }
  }
  kill(-pid, SIGKILL);
  if (result.timed_out) waitpid(pid, &status, 0);
  if (status >= 0 && WIFEXITED(status)) result.exit_status = WEXITSTATUS(status);
  return result;
}

SolverVerdict run_solver(const std::string& script, const SolverConfig& config) {
  auto start = std::chrono::steady_clock::now();
  SolverVerdict verdict;
  if (config.command.empty()) {
    verdict.message = "empty solver command";
    return verdict;
  }

  std::vector<std::string> argv = config.command;
  std::string temp_path;
  bool uses_file = false;
  for (const auto& a : argv) uses_file = uses_file || a.find("{file}") != std::string::npos;
  if (uses_file) {
    fs::path dir = config.working_dir.empty() ? fs::temp_directory_path() : config.working_dir;
    std::string pattern = (dir / "smtbridge-XXXXXX.smt2").string();
    std::vector<char> name(pattern.begin(), pattern.end());
    name.push_back('\0');
    int fd = mkstemps(name.data(), 5);
    if (fd < 0) {
      verdict.message = "cannot create a temporary script in " + dir.string() + ": " + std::strerror(errno);
      return verdict;
    }
    temp_path = name.data();
    size_t off = 0;
    while (off < script.size()) {
      ssize_t w = write(fd, script.data() + off, script.size() - off);
      if (w <= 0) break;
      off += w;
    }
    close(fd);
    for (auto& a : argv) {
      for (size_t p; (p = a.find("{file}")) != std::string::npos;) a.replace(p, 6, temp_path);
    }
  }

  ProcessResult pr = run_process(argv, uses_file ? std::string() : script, config.timeout_seconds, config.working_dir);
  if (!temp_path.empty()) std::remove(temp_path.c_str());

  if (!pr.started) {
    verdict.message = pr.error;
  } else if (pr.timed_out) {
    verdict.message = "solver timed out after " + std::to_string(config.timeout_seconds) + " s";
    verdict.raw_output = pr.output;
  } else {
    verdict = interpret_solver_output(pr.output);
  }
  verdict.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return verdict;
}

// ---------------------------------------------------------------------------
// Binary identity

std::optional<fs::path> resolve_executable(const std::string& name) {
  std::error_code ec;
  if (name.find('/') != std::string::npos) {
    if (access(name.c_str(), X_OK) == 0) return fs::canonical(name, ec);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) dir = ".";
    fs::path candidate = fs::path(dir) / name;
    if (fs::is_regular_file(candidate, ec) && access(candidate.c_str(), X_OK) == 0) {
      auto canon = fs::canonical(candidate, ec);
      return ec ? candidate : canon;
    }
  }
  return std::nullopt;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace smtbridge
