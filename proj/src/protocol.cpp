#include "lzcomm/protocol.hpp"

#include "lzcomm/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

namespace lzcomm {

void ProtocolConfig::validate() const
{
    if (width < 1 || width > 64) throw Error("width must be in [1, 64]");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw Error("epsilon must be in (0, 1/2)");
    if (sigma < 1 || sigma > kIntsSigma) throw Error("sigma must be in [1, 2^32 - 2]");
}

double comparison_error_bound(std::uint64_t factors, unsigned width) noexcept
{
    const double field = 3.0 * static_cast<double>(factors) / static_cast<double>(kMersenne61 - 1);
    const double cut = width >= 61 ? 0.0 : std::ldexp(1.0, -static_cast<int>(width));
    return std::min(1.0, field + cut);
}

namespace {

constexpr std::uint64_t kTagAlice = 1;
constexpr std::uint64_t kTagBob = 2;
constexpr unsigned kMaxVerifications = 8;

// LZN factors of a text, parsed only as far as anyone asks.
class FactorStream {
public:
    explicit FactorStream(std::span<const Symbol> text) : text_(text), parser_(text, Mode::LZN) {}

    void ensure(std::size_t k)
    {
        while (factors_.size() < k) {
            auto f = parser_.next();
            if (!f) break;
            factors_.push_back(*f);
            ends_.push_back(ends_.back() + f->length);
        }
    }

    std::size_t available(std::size_t k)
    {
        ensure(k);
        return std::min(k, factors_.size());
    }

    const std::vector<Factor>& factors() const noexcept { return factors_; }
    std::uint64_t end(std::size_t k) const { return ends_[k]; }
    std::span<const Symbol> text() const noexcept { return text_; }

private:
    std::span<const Symbol> text_;
    GreedyParser parser_;
    std::vector<Factor> factors_;
    std::vector<std::uint64_t> ends_{0};
};

std::uint64_t symbol_code(const Factor& f, std::uint64_t sigma)
{
    if (f.truncated) return sigma + 2;
    if (f.last == kHashSentinel) return sigma;
    if (f.last == kDollarSentinel) return sigma + 1;
    if (f.last >= sigma) throw ProtocolError("symbol " + std::to_string(f.last) + " outside the alphabet");
    return f.last;
}

// One LCP search between two strings. Both sides run the same search
// bookkeeping; Alice probes with fingerprints, Bob answers with one bit.
class LcpSession {
public:
    LcpSession(Speaker role, std::span<const Symbol> text, std::uint64_t n, const ProtocolConfig& cfg,
               CoinStream& coins)
        : role_(role), stream_(text), n_(n), cfg_(cfg), coins_(coins)
    {
        new_base();
    }

    CodecContext codec() const noexcept { return {n_, cfg_.sigma}; }
    bool done() const noexcept { return state_ == State::Done; }
    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t lcp() const noexcept { return lcp_; }
    std::uint64_t matching_factors() const noexcept { return k_found_; }
    std::uint64_t z() const noexcept { return z_; }

    Message start()
    {
        if (role_ != Speaker::Alice) throw ProtocolError("only Alice opens a search");
        return probe();
    }

    MessageKind expect(std::uint32_t bits) const
    {
        if (role_ == Speaker::Alice) return state_ == State::Phase2 ? MessageKind::Length : MessageKind::Boolean;
        if (state_ == State::Phase2) return bits == kControlBits ? MessageKind::Control : MessageKind::Triple;
        return MessageKind::Fingerprint;
    }

    std::optional<Message> on(const Message& m)
    {
        if (state_ == State::Done) throw ProtocolError("message after the session ended");
        if (m.kind != expect(m.bits)) throw ProtocolError("unexpected " + std::string(kind_name(m.kind)));
        return role_ == Speaker::Alice ? alice_on(m) : bob_on(m);
    }

private:
    enum class State { Search, Verify, Phase2, Done };

    std::uint64_t own_tag() const noexcept { return role_ == Speaker::Alice ? kTagAlice : kTagBob; }

    void new_base()
    {
        scheme_ = FingerprintScheme::draw(coins_, cfg_.width);
        fps_ = PrefixFingerprints(scheme_.base);
        lo_ = 0;
        k_ = 1;
        hi_.reset();
        state_ = State::Search;
    }

    std::uint64_t padded(std::size_t k)
    {
        stream_.ensure(k);
        const auto& fs = stream_.factors();
        while (fps_.count() < fs.size()) fps_.push(fs[fps_.count()]);
        return scheme_.truncate(fps_.padded(k, own_tag()));
    }

    std::uint64_t verify_fp(std::size_t k)
    {
        const std::size_t have = stream_.available(k);
        const auto& fs = stream_.factors();
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < have; ++i) acc = fold_factor(acc, fs[i], verify_base_);
        for (std::size_t i = have; i < k; ++i) acc = fold_padding(acc, own_tag(), verify_base_);
        return acc & (cfg_.width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cfg_.width) - 1);
    }

    void advance(bool equal)
    {
        if (!hi_) {
            if (equal) {
                lo_ = k_;
                k_ *= 2;
                return;
            }
            hi_ = k_;
        } else if (equal) {
            lo_ = k_;
        } else {
            hi_ = k_;
        }
        if (*hi_ - lo_ <= 1) {
            k_found_ = lo_;
            if (cfg_.verify && verifications_ < kMaxVerifications) {
                verify_base_ = draw_base(coins_);
                state_ = State::Verify;
            } else {
                state_ = State::Phase2;
            }
        } else {
            k_ = lo_ + (*hi_ - lo_) / 2;
        }
    }

    // Verification outcome; a failure restarts the search under a new base.
    void verified(bool equal)
    {
        ++verifications_;
        if (equal) state_ = State::Phase2;
        else new_base();
    }

    Message probe()
    {
        Message m;
        m.speaker = Speaker::Alice;
        m.kind = MessageKind::Fingerprint;
        m.bits = cfg_.width;
        m.value = state_ == State::Verify ? verify_fp(k_found_) : padded(k_);
        return m;
    }

    Message mismatch_report()
    {
        const std::size_t k = k_found_;
        stream_.ensure(k + 1);
        const auto& fs = stream_.factors();
        Message m;
        m.speaker = Speaker::Alice;
        if (fs.size() > k) {
            const Factor& f = fs[k];
            m.kind = MessageKind::Triple;
            m.source = f.source;
            m.length = f.length;
            m.symbol_code = symbol_code(f, cfg_.sigma);
            m.bits = 2 * length_bits(n_) + symbol_bits(cfg_.sigma);
        } else {
            m.kind = MessageKind::Control;
            m.value = static_cast<std::uint64_t>(Control::End);
            m.bits = kControlBits;
        }
        return m;
    }

    Message next_alice_message()
    {
        if (state_ == State::Phase2) return mismatch_report();
        return probe();
    }

    std::optional<Message> alice_on(const Message& m)
    {
        if (state_ == State::Search) {
            advance(m.value != 0);
            return next_alice_message();
        }
        if (state_ == State::Verify) {
            verified(m.value != 0);
            return next_alice_message();
        }
        finish(m.value);
        return std::nullopt;
    }

    std::optional<Message> bob_on(const Message& m)
    {
        Message reply;
        reply.speaker = Speaker::Bob;
        if (state_ == State::Search || state_ == State::Verify) {
            const bool equal = state_ == State::Search ? padded(k_) == m.value : verify_fp(k_found_) == m.value;
            if (state_ == State::Search) advance(equal);
            else verified(equal);
            reply.kind = MessageKind::Boolean;
            reply.bits = 1;
            reply.value = equal ? 1 : 0;
            return reply;
        }
        const std::uint64_t ell = bob_length(m);
        finish(ell);
        reply.kind = MessageKind::Length;
        reply.bits = length_bits(n_);
        reply.value = ell;
        return reply;
    }

    // Expands Alice's first differing factor against the common prefix and
    // extends the match into Bob's text. A reference that does not fit the
    // prefix can only follow a fingerprint collision; the prefix is kept.
    std::uint64_t bob_length(const Message& m)
    {
        const auto text = stream_.text();
        const std::uint64_t l0 = stream_.end(stream_.available(k_found_));
        if (m.kind == MessageKind::Control) return l0;
        const std::uint64_t s = m.source;
        const std::uint64_t len = m.length;
        const std::uint64_t code = m.symbol_code;
        std::vector<Symbol> f;
        if (len == 0) return l0;
        if (code == cfg_.sigma + 2) {
            if (s == 0 || s + len - 1 > l0) return l0;
            f.assign(text.begin() + static_cast<std::ptrdiff_t>(s - 1),
                     text.begin() + static_cast<std::ptrdiff_t>(s - 1 + len));
        } else {
            Symbol last = 0;
            if (code < cfg_.sigma) last = static_cast<Symbol>(code);
            else if (code == cfg_.sigma) last = kHashSentinel;
            else if (code == cfg_.sigma + 1) last = kDollarSentinel;
            else return l0;
            if (s == 0) {
                if (len != 1) return l0;
            } else {
                if (len < 2 || s + len - 2 > l0) return l0;
                f.assign(text.begin() + static_cast<std::ptrdiff_t>(s - 1),
                         text.begin() + static_cast<std::ptrdiff_t>(s - 1 + len - 1));
            }
            f.push_back(last);
        }
        return l0 + lzcomm::lcp(f, text.subspan(l0));
    }

    void finish(std::uint64_t ell)
    {
        lcp_ = ell;
        const std::uint64_t l0 = stream_.end(stream_.available(k_found_));
        z_ = k_found_ + (ell > l0 ? 1 : 0);
        state_ = State::Done;
    }

    Speaker role_;
    FactorStream stream_;
    std::uint64_t n_;
    const ProtocolConfig& cfg_;
    CoinStream& coins_;
    FingerprintScheme scheme_;
    PrefixFingerprints fps_{2};
    std::uint64_t verify_base_ = 2;
    unsigned verifications_ = 0;

    State state_ = State::Search;
    std::size_t lo_ = 0;
    std::size_t k_ = 1;
    std::optional<std::size_t> hi_;
    std::size_t k_found_ = 0;

    std::uint64_t lcp_ = 0;
    std::uint64_t z_ = 0;
};

SymbolString checked_text(const Factorization& input, const ProtocolConfig& config)
{
    config.validate();
    if (input.mode() != Mode::LZN) throw Error("protocol inputs must be LZN factorizations");
    require_canonical(input);
    SymbolString s = decompress(input);
    for (Symbol c : s) {
        if (c >= config.sigma) throw Error("symbol " + std::to_string(c) + " outside the alphabet of size " +
                                           std::to_string(config.sigma));
    }
    return s;
}

// Shared transcript bookkeeping.
class Logged {
protected:
    Transcript log_;

    void open_session(bool setup, std::uint64_t n) { log_.sessions.push_back({setup, n, 0, 0}); }

    void record(const Message& m)
    {
        log_.messages.push_back(m);
        log_.sessions.back().rounds += 1;
        log_.sessions.back().bits += m.bits;
    }
};

} // namespace

class LcpParty final : public Party, private Logged {
public:
    LcpParty(Speaker role, const Factorization& input, std::uint64_t n, const ProtocolConfig& config)
        : role_(role), config_(config), coins_(config.seed), text_(checked_text(input, config_))
    {
        if (text_.size() > n) throw Error("session length is shorter than the input");
        log_.protocol = "lcp";
        log_.width = config_.width;
        log_.sigma = config_.sigma;
        open_session(false, n);
        session_.emplace(role_, text_.span(), n, config_, coins_);
    }
    LcpParty(const LcpParty&) = delete;
    LcpParty& operator=(const LcpParty&) = delete;

    Speaker role() const noexcept override { return role_; }

    std::vector<Outgoing> open() override
    {
        if (role_ != Speaker::Alice) return {};
        return {send(session_->start())};
    }

    Message decode(const Frame& frame) const override
    {
        return lzcomm::decode(frame, peer(), session_->expect(frame.bits), session_->codec());
    }

    std::vector<Outgoing> receive(const Message& m) override
    {
        record(m);
        auto reply = session_->on(m);
        if (!reply) return {};
        return {send(*reply)};
    }

    bool finished() const noexcept override { return session_->done(); }

    Transcript transcript() const override
    {
        Transcript t = log_;
        t.result = result_json();
        return t;
    }

    LcpOutcome outcome() const
    {
        LcpOutcome o;
        o.lcp = session_->lcp();
        o.matching_factors = session_->matching_factors();
        o.z = session_->z();
        o.transcript = transcript();
        return o;
    }

private:
    Speaker peer() const noexcept { return role_ == Speaker::Alice ? Speaker::Bob : Speaker::Alice; }

    Outgoing send(const Message& m)
    {
        record(m);
        return {m, encode(m, session_->codec())};
    }

    nlohmann::json result_json() const
    {
        if (!session_->done()) return nlohmann::json::object();
        return {{"value", session_->lcp()},
                {"lcp", session_->lcp()},
                {"k", session_->matching_factors()},
                {"z", session_->z()}};
    }

    Speaker role_;
    ProtocolConfig config_;
    CoinStream coins_;
    SymbolString text_;
    std::optional<LcpSession> session_;
};

class HammingParty final : public Party, private Logged {
public:
    HammingParty(Speaker role, const Factorization& input, const ProtocolConfig& config)
        : role_(role), config_(config), coins_(config.seed), raw_(checked_text(input, config_))
    {
        log_.protocol = "hamming";
        log_.width = config_.width;
        log_.sigma = config_.sigma;
        if (config_.sentinel) {
            std::vector<Symbol> w;
            w.reserve(raw_.size() + 2);
            const Symbol open = role_ == Speaker::Alice ? kHashSentinel : kDollarSentinel;
            const Symbol close = role_ == Speaker::Alice ? kDollarSentinel : kHashSentinel;
            w.push_back(open);
            w.insert(w.end(), raw_.begin(), raw_.end());
            w.push_back(close);
            text_ = SymbolString(std::move(w));
        } else {
            text_ = raw_;
        }
        total_ = text_.size();
    }
    HammingParty(const HammingParty&) = delete;
    HammingParty& operator=(const HammingParty&) = delete;

    Speaker role() const noexcept override { return role_; }

    std::vector<Outgoing> open() override
    {
        if (role_ != Speaker::Alice) return {};
        std::vector<Outgoing> out;
        Message n;
        n.speaker = Speaker::Alice;
        n.kind = MessageKind::Length;
        n.value = raw_.size();
        n.bits = length_bits(raw_.size());
        open_session(true, raw_.size());
        out.push_back(send(n, {raw_.size(), config_.sigma}));
        awaiting_first_reply_ = true;
        out.push_back(send_opt(begin_session()));
        return out;
    }

    Message decode(const Frame& frame) const override
    {
        if (role_ == Speaker::Bob) {
            if (!setup_done_) return lzcomm::decode(frame, Speaker::Alice, MessageKind::Length, {});
            if (abort_pending_) return lzcomm::decode(frame, Speaker::Alice, MessageKind::Fingerprint, {});
            return lzcomm::decode(frame, Speaker::Alice, session_->expect(frame.bits), session_->codec());
        }
        if (awaiting_first_reply_ && frame.bits == kControlBits) {
            return lzcomm::decode(frame, Speaker::Bob, MessageKind::Control, {});
        }
        return lzcomm::decode(frame, Speaker::Bob, session_->expect(frame.bits), session_->codec());
    }

    std::vector<Outgoing> receive(const Message& m) override
    {
        if (finished_) throw ProtocolError("message after the protocol ended");
        if (role_ == Speaker::Bob && !setup_done_) {
            if (m.kind != MessageKind::Length) throw ProtocolError("expected the length announcement");
            open_session(true, m.value);
            record(m);
            setup_done_ = true;
            if (m.value != raw_.size()) {
                abort_pending_ = true;
                open_session(false, m.value + (config_.sentinel ? 2 : 0));
            } else {
                begin_session();
            }
            return {};
        }
        record(m);
        if (abort_pending_) {
            Message a;
            a.speaker = Speaker::Bob;
            a.kind = MessageKind::Control;
            a.value = static_cast<std::uint64_t>(Control::Abort);
            a.bits = kControlBits;
            aborted_ = finished_ = true;
            return {send(a, {})};
        }
        if (awaiting_first_reply_ && m.kind == MessageKind::Control) {
            aborted_ = finished_ = true;
            return {};
        }
        awaiting_first_reply_ = false;
        std::vector<Outgoing> out;
        const CodecContext ctx = session_->codec();
        if (auto reply = session_->on(m)) out.push_back(send(*reply, ctx));
        if (session_->done()) {
            if (auto next = conclude()) out.push_back(send(*next, session_->codec()));
        }
        return out;
    }

    bool finished() const noexcept override { return finished_; }

    Transcript transcript() const override
    {
        Transcript t = log_;
        t.result = result_json();
        return t;
    }

    HammingOutcome outcome() const
    {
        HammingOutcome o;
        o.aborted = aborted_;
        o.raw_distance = jumps_pos_.size();
        o.jumps = jumps_;
        o.positions = reported_positions();
        o.distance = o.positions.size();
        o.gap_max = gap_max(o.positions);
        o.transcript = transcript();
        return o;
    }

private:
    std::vector<std::uint64_t> reported_positions() const
    {
        if (!config_.sentinel) return jumps_pos_;
        std::vector<std::uint64_t> out;
        for (std::uint64_t p : jumps_pos_) {
            if (p >= 2 && p + 1 <= total_) out.push_back(p - 1);
        }
        return out;
    }

    std::uint64_t gap_max(const std::vector<std::uint64_t>& pos) const
    {
        if (pos.empty()) return raw_.size();
        if (pos.size() == 1) return pos[0];
        std::uint64_t g = 0;
        for (std::size_t k = 1; k < pos.size(); ++k) g = std::max(g, pos[k] - pos[k - 1] + 1);
        return g;
    }

    nlohmann::json result_json() const
    {
        if (!finished_) return nlohmann::json::object();
        if (aborted_) return {{"aborted", true}};
        const auto pos = reported_positions();
        return {{"value", pos.size()},           {"distance", pos.size()},
                {"positions", pos},              {"raw_distance", jumps_pos_.size()},
                {"gap_max", gap_max(pos)},       {"invocations", jumps_.size()}};
    }

    Outgoing send(const Message& m, const CodecContext& ctx)
    {
        record(m);
        return {m, encode(m, ctx)};
    }

    Outgoing send_opt(std::optional<Message> m)
    {
        if (!m) throw ProtocolError("expected an opening probe");
        return send(*m, session_->codec());
    }

    // Starts the search on the remaining suffixes; Alice's opening probe is
    // returned.
    std::optional<Message> begin_session()
    {
        const std::uint64_t n = total_ - offset_;
        open_session(false, n);
        session_.emplace(role_, text_.span().subspan(offset_), n, config_, coins_);
        if (role_ == Speaker::Alice) return session_->start();
        return std::nullopt;
    }

    std::optional<Message> conclude()
    {
        const std::uint64_t ell = session_->lcp();
        const SessionInfo& info = log_.sessions.back();
        jumps_.push_back({offset_, session_->n(), ell, session_->matching_factors(), info.rounds, info.bits});
        if (offset_ + ell >= total_) {
            finished_ = true;
            return std::nullopt;
        }
        offset_ += ell + 1;
        jumps_pos_.push_back(offset_);
        return begin_session();
    }

    Speaker role_;
    ProtocolConfig config_;
    CoinStream coins_;
    SymbolString raw_;
    SymbolString text_;
    std::uint64_t total_ = 0;

    std::optional<LcpSession> session_;
    std::uint64_t offset_ = 0;
    std::vector<std::uint64_t> jumps_pos_; // mismatch positions in working coordinates
    std::vector<JumpRecord> jumps_;

    bool setup_done_ = false;
    bool abort_pending_ = false;
    bool awaiting_first_reply_ = false;
    bool aborted_ = false;
    bool finished_ = false;
};

std::unique_ptr<Party> make_lcp_party(Speaker role, const Factorization& input, std::uint64_t n,
                                      const ProtocolConfig& config)
{
    return std::make_unique<LcpParty>(role, input, n, config);
}

std::unique_ptr<Party> make_hamming_party(Speaker role, const Factorization& input, const ProtocolConfig& config)
{
    return std::make_unique<HammingParty>(role, input, config);
}

LcpOutcome lcp_outcome(const Party& party)
{
    const auto* p = dynamic_cast<const LcpParty*>(&party);
    if (!p) throw Error("not an LCP party");
    return p->outcome();
}

HammingOutcome hamming_outcome(const Party& party)
{
    const auto* p = dynamic_cast<const HammingParty*>(&party);
    if (!p) throw Error("not a Hamming party");
    return p->outcome();
}

namespace {

// Both logs see the same channel. Derived results may still differ after a
// fingerprint collision, which is the protocol's error event.
void require_same_traffic(const Transcript& a, const Transcript& b)
{
    if (a.messages != b.messages || a.sessions != b.sessions) {
        throw ProtocolError("parties logged different traffic");
    }
}

} // namespace

void run_in_process(Party& alice, Party& bob)
{
    std::deque<std::pair<Party*, Frame>> queue;
    auto other = [&](Party* p) { return p == &alice ? &bob : &alice; };
    for (auto& o : alice.open()) queue.emplace_back(&bob, std::move(o.frame));
    for (auto& o : bob.open()) queue.emplace_back(&alice, std::move(o.frame));
    while (!queue.empty()) {
        auto [dst, frame] = std::move(queue.front());
        queue.pop_front();
        const Message m = dst->decode(frame);
        for (auto& o : dst->receive(m)) queue.emplace_back(other(dst), std::move(o.frame));
    }
    if (!alice.finished() || !bob.finished()) throw ProtocolError("protocol stalled before both parties finished");
}

LcpOutcome lcp_protocol(const Factorization& alice, const Factorization& bob, const ProtocolConfig& config)
{
    const std::uint64_t n = std::max(alice.original_length(), bob.original_length());
    LcpParty a(Speaker::Alice, alice, n, config);
    LcpParty b(Speaker::Bob, bob, n, config);
    run_in_process(a, b);
    LcpOutcome out = a.outcome();
    require_same_traffic(out.transcript, b.transcript());
    return out;
}

HammingOutcome hamming_protocol(const Factorization& alice, const Factorization& bob, const ProtocolConfig& config)
{
    HammingParty a(Speaker::Alice, alice, config);
    HammingParty b(Speaker::Bob, bob, config);
    run_in_process(a, b);
    HammingOutcome out = a.outcome();
    require_same_traffic(out.transcript, b.transcript());
    if (out.aborted) throw ProtocolError("input lengths differ");
    return out;
}

} // namespace lzcomm
