"""Command-line front door composing the library into reproducible runs.

Subcommands: spdc, sim, fit, calibrate, tomo, qkd, cipher, stego, crack,
demo-e2e. Results are JSON on stdout (ciphers echo plain text); file
artifacts carry manifest sidecars with SHA-256 digests. Stochastic commands
require an explicit --seed; nothing reads the clock or the environment.

Exit codes: 0 success, 2 invalid arguments or validation failure, 1 runtime
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, ciphers, detectors, photostats, qkd, qstate, spdc, stego
from .manifest import RunManifest

__all__ = ["main", "build_parser"]


def _print_json(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _write_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _state_from_name(name: str) -> np.ndarray:
    labels = {
        "phi+": "phi_plus",
        "phi-": "phi_minus",
        "psi+": "psi_plus",
        "psi-": "psi_minus",
    }
    if name in labels:
        return qstate.ket_to_density(qstate.bell_state(labels[name]))
    if name == "hh":
        return qstate.ket_to_density(np.kron(qstate.KET_H, qstate.KET_H))
    if name == "mixed":
        return np.eye(4, dtype=complex) / 4.0
    if name.startswith("werner:"):
        return qstate.werner_state(float(name.split(":", 1)[1]))
    raise ValueError(
        f"unknown state {name!r}; use hh, phi+, phi-, psi+, psi-, mixed or werner:P"
    )


def _detector_from_args(args, side: int) -> photostats.DetectorSpec:
    preset_arg = getattr(args, f"preset{side}")
    if preset_arg:
        family, _, variant = preset_arg.partition(":")
        return detectors.load_preset(family, variant or "default").spec
    return photostats.DetectorSpec(
        efficiency=getattr(args, f"eff{side}"),
        dark_rate_hz=getattr(args, f"dark{side}"),
        jitter_fwhm_ps=getattr(args, f"jitter{side}"),
        dead_time_ns=getattr(args, f"dead{side}"),
    )


def _read_text_arg(args) -> str:
    if args.text is not None:
        return args.text
    if args.infile is not None:
        return Path(args.infile).read_text()
    raise ValueError("provide --text or --in")


def _emit_text(args, result: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(result)
    print(result)


# ---------------------------------------------------------------------------
# handlers


def _cmd_spdc_idler(args) -> None:
    pump = spdc.WavelengthNm(args.pump, args.pump_unc)
    signal = spdc.WavelengthNm(args.signal, args.signal_unc)
    idler = spdc.idler_wavelength(pump, signal)
    _print_json(
        {
            "lambda_p_nm": pump.value,
            "lambda_s_nm": signal.value,
            "lambda_i_nm": idler.value,
            "d_lambda_i_nm": spdc.idler_uncertainty(pump, signal),
        }
    )


def _cmd_spdc_tuning_curve(args) -> None:
    pump = spdc.WavelengthNm(args.pump, args.pump_unc)
    signals = [
        spdc.WavelengthNm(v, args.signal_unc)
        for v in np.linspace(args.signal_start, args.signal_stop, args.steps)
    ]
    spdc.write_tuning_curve_csv(args.out, pump, signals)
    manifest = RunManifest(
        command="spdc tuning-curve",
        params={
            "pump": args.pump,
            "pump_unc": args.pump_unc,
            "signal_start": args.signal_start,
            "signal_stop": args.signal_stop,
            "signal_unc": args.signal_unc,
            "steps": args.steps,
        },
    )
    manifest.record_output(args.out)
    manifest.write_sidecar(args.out)
    _print_json({"rows": args.steps, "out": str(args.out), "manifest": manifest.to_dict()})


def _cmd_spdc_qpm(args) -> None:
    period = spdc.required_poling_period(args.delta_k, args.order)
    _print_json(
        {
            "delta_k_per_um": args.delta_k,
            "order": args.order,
            "required_poling_period_um": period,
        }
    )


def _cmd_spdc_polarizations(args) -> None:
    triple = spdc.spdc_polarizations(args.type, args.pump)
    _print_json(
        {"pump": triple.pump, "signal": triple.signal, "idler": triple.idler, "type": args.type}
    )


def _cmd_spdc_deff(args) -> None:
    crystals = (
        spdc.load_crystal_file(args.config) if args.config else spdc.builtin_crystals()
    )
    if args.crystal not in crystals:
        raise ValueError(f"unknown crystal {args.crystal!r}; available: {sorted(crystals)}")
    crystal = crystals[args.crystal]
    vectors = []
    for label in ("pump_dir", "signal_dir", "idler_dir"):
        raw = getattr(args, label)
        vec = np.array([float(x) for x in raw.split(",")])
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError(f"{label} must be non-zero")
        vectors.append(vec / norm)
    d_eff = spdc.effective_nonlinearity(crystal.d_contracted, *vectors)
    _print_json({"crystal": args.crystal, "d_eff_pm_per_v": d_eff})


def _cmd_sim(args) -> None:
    pulses = photostats.PulseTrainSpec(
        mean_pairs_per_pulse=args.mu, n_pulses=args.pulses, period_ns=args.period_ns
    )
    det1 = _detector_from_args(args, 1)
    det2 = _detector_from_args(args, 2)
    stream_a, stream_b = photostats.simulate_streams(
        pulses, (args.trans1, args.trans2), (det1, det2), seed=args.seed
    )
    writers = {"csv": photostats.write_stream_csv, "npz": photostats.write_stream_npz}
    writer = writers[args.format]
    writer(args.out_a, stream_a)
    writer(args.out_b, stream_b)
    manifest = RunManifest(
        command="sim",
        params={
            "pulses": args.pulses,
            "mu": args.mu,
            "period_ns": args.period_ns,
            "trans": [args.trans1, args.trans2],
            "detectors": [
                {"efficiency": d.efficiency, "dark_rate_hz": d.dark_rate_hz,
                 "jitter_fwhm_ps": d.jitter_fwhm_ps, "dead_time_ns": d.dead_time_ns}
                for d in (det1, det2)
            ],
            "format": args.format,
        },
        seed=args.seed,
    )
    manifest.record_output(args.out_a)
    manifest.record_output(args.out_b)
    manifest.write_sidecar(args.out_a)
    manifest.write_sidecar(args.out_b)
    _print_json(
        {
            "n_tags_a": len(stream_a),
            "n_tags_b": len(stream_b),
            "out_a": str(args.out_a),
            "out_b": str(args.out_b),
            "manifest": manifest.to_dict(),
        }
    )


def _cmd_fit(args) -> None:
    if args.hist:
        hist = photostats.histogram_from_json(json.loads(Path(args.hist).read_text()))
        params = {"hist": str(args.hist)}
    else:
        if not (args.in_a and args.in_b):
            raise ValueError("provide --hist or both --in-a and --in-b")
        reader = photostats.read_stream_npz if str(args.in_a).endswith(".npz") else photostats.read_stream_csv
        stream_a = reader(args.in_a)
        stream_b = reader(args.in_b)
        hist = photostats.build_histogram(stream_a, stream_b, args.bin_ps, args.window_ps)
        params = {
            "in_a": str(args.in_a),
            "in_b": str(args.in_b),
            "bin_ps": args.bin_ps,
            "window_ps": args.window_ps,
        }
    fit = photostats.fit_gaussian(hist)
    result = {
        "fit": photostats.fit_to_json(fit),
        "histogram": {
            "total_counts": hist.total(),
            "bin_width_ps": hist.bin_width_ps,
            "t_min_ps": hist.t_min_ps,
            "t_max_ps": hist.t_max_ps,
        },
        "manifest": RunManifest(command="fit", params=params).to_dict(),
    }
    if fit.b > 0:
        result["snr"] = photostats.snr(fit)
    if args.out:
        _write_json(args.out, result)
    _print_json(result)


def _cmd_calibrate(args) -> None:
    if args.simulate:
        if args.seed is None:
            raise ValueError("--seed is required with --simulate")
        n_s, n_i, n_c = photostats.simulate_pair_thinning(
            args.pairs, args.eta_s, args.eta_i, seed=args.seed
        )
        est_s, est_i = photostats.klyshko_calibrate(n_s, n_i, n_c)
        _print_json(
            {
                "true_eta_s": args.eta_s,
                "true_eta_i": args.eta_i,
                "n_s": n_s,
                "n_i": n_i,
                "n_c": n_c,
                "estimated_eta_s": est_s,
                "estimated_eta_i": est_i,
                "manifest": RunManifest(
                    command="calibrate",
                    params={"pairs": args.pairs, "eta_s": args.eta_s, "eta_i": args.eta_i},
                    seed=args.seed,
                ).to_dict(),
            }
        )
    else:
        if None in (args.ns, args.ni, args.nc):
            raise ValueError("provide --ns --ni --nc, or --simulate")
        est_s, est_i = photostats.klyshko_calibrate(args.ns, args.ni, args.nc)
        _print_json({"estimated_eta_s": est_s, "estimated_eta_i": est_i})


def _cmd_tomo_simulate(args) -> None:
    rho = _state_from_name(args.state)
    records = qstate.simulate_tomography(rho, args.n_ref, seed=args.seed, noiseless=args.noiseless)
    payload = {
        "records": qstate.records_to_json(records),
        "manifest": RunManifest(
            command="tomo simulate",
            params={"state": args.state, "n_ref": args.n_ref, "noiseless": args.noiseless},
            seed=args.seed,
        ).to_dict(),
    }
    _write_json(args.out, payload)
    _print_json({"out": str(args.out), "n_records": len(records)})


def _cmd_tomo_reconstruct(args) -> None:
    payload = json.loads(Path(args.infile).read_text())
    records = qstate.records_from_json(payload["records"])
    result = qstate.mle_reconstruct(records)
    report = {
        "density_matrix": qstate.density_matrix_to_json(result.rho),
        "converged": result.converged,
        "iterations": result.n_iter,
        "log_likelihood": result.log_likelihood,
        "clipped_mass": result.clipped_mass,
        "concurrence": qstate.concurrence(result.rho),
        "bell_parameter": qstate.bell_parameter(result.rho),
        "purity": qstate.purity(result.rho),
        "manifest": RunManifest(
            command="tomo reconstruct", params={"in": str(args.infile)}
        ).to_dict(),
    }
    if args.target:
        report["fidelity_target"] = args.target
        report["fidelity"] = qstate.fidelity(result.rho, _state_from_name(args.target))
    if args.out:
        _write_json(args.out, report)
    _print_json(report)


def _cmd_qkd_bb84(args) -> None:
    channel = qkd.ChannelSpec(loss_probability=args.loss, depolarizing_probability=args.depol)
    eve = qkd.EveStrategy.INTERCEPT_RESEND if args.eve == "intercept" else qkd.EveStrategy.NONE
    session = qkd.bb84_run(args.n, channel, eve, seed=args.seed)
    result = {
        "n_sent": session.n_sent,
        "n_received": session.n_received,
        "n_sifted": session.n_sifted,
        "sift_fraction": session.n_sifted / session.n_sent,
        "qber": session.qber,
        "sifted_key_alice_hex": qkd.bits_to_hex(session.sifted_alice),
        "sifted_key_bob_hex": qkd.bits_to_hex(session.sifted_bob),
        "manifest": RunManifest(
            command="qkd bb84",
            params={"n": args.n, "loss": args.loss, "depol": args.depol, "eve": args.eve},
            seed=args.seed,
        ).to_dict(),
    }
    if args.out:
        _write_json(args.out, result)
    _print_json(result)


def _cmd_qkd_relay(args) -> None:
    k_a = qkd.hex_to_bits(args.key_a)
    k_b = qkd.hex_to_bits(args.key_b)
    word = qkd.relay_decode(k_a, k_b) if args.decode else qkd.relay_encode(k_a, k_b)
    _print_json(
        {
            "operation": "decode" if args.decode else "encode",
            "result_hex": qkd.bits_to_hex(word),
        }
    )


def _cmd_cipher(args) -> None:
    text = _read_text_arg(args)
    name, mode = args.name, args.mode
    if name == "railfence":
        if args.rails is None:
            raise ValueError("railfence needs --rails")
        fn = ciphers.rail_fence_encrypt if mode == "encrypt" else ciphers.rail_fence_decrypt
        _emit_text(args, fn(text, args.rails))
    elif name == "caesar":
        if args.shift is None:
            raise ValueError("caesar needs --shift")
        shift = args.shift if mode == "encrypt" else -args.shift
        _emit_text(args, ciphers.caesar(text, shift))
    elif name == "rot13":
        _emit_text(args, ciphers.rot13(text))
    elif name == "vigenere":
        if not args.key:
            raise ValueError("vigenere needs --key")
        fn = ciphers.vigenere_encrypt if mode == "encrypt" else ciphers.vigenere_decrypt
        _emit_text(args, fn(text, args.key))
    elif name == "playfair":
        table = (
            ciphers.PlayfairTable.from_string(args.table)
            if args.table
            else ciphers.REFERENCE_PLAYFAIR_TABLE
        )
        fn = ciphers.playfair_encrypt if mode == "encrypt" else ciphers.playfair_decrypt
        _emit_text(args, fn(text, table))
    elif name == "homophonic":
        fn = (
            ciphers.homophonic_adjacent_encrypt
            if mode == "encrypt"
            else ciphers.homophonic_adjacent_decrypt
        )
        _emit_text(args, fn(text))
    elif name == "otp":
        if not args.key_hex:
            raise ValueError("otp needs --key-hex")
        if mode == "encrypt":
            bits = stego.ascii_to_bits(text)
            key = qkd.hex_to_bits(args.key_hex, bits.size)
            if key.size < bits.size:
                raise ValueError(
                    f"key of {key.size} bits is shorter than the {bits.size}-bit message"
                )
            _emit_text(args, qkd.bits_to_hex(ciphers.otp_xor(key, bits)))
        else:
            bits = qkd.hex_to_bits(text.strip())
            n_bits = 8 * (bits.size // 8)
            bits = bits[:n_bits]
            key = qkd.hex_to_bits(args.key_hex, bits.size)
            if key.size < bits.size:
                raise ValueError(
                    f"key of {key.size} bits is shorter than the {bits.size}-bit message"
                )
            _emit_text(args, stego.bits_to_ascii(ciphers.otp_xor(key, bits)))
    else:
        raise ValueError(f"unknown cipher {name!r}")


def _cmd_stego_embed(args) -> None:
    image = stego.read_ppm(args.image)
    if args.payload_text is not None:
        bits = stego.ascii_to_bits(args.payload_text)
    elif args.payload_file is not None:
        bits = stego.ascii_to_bits(Path(args.payload_file).read_text())
    else:
        raise ValueError("provide --payload-text or --payload-file")
    out_image = stego.lsb_embed(image, bits)
    stego.write_ppm(args.out, out_image, binary=args.binary)
    manifest = RunManifest(
        command="stego embed",
        params={"image": str(args.image), "n_bits": int(bits.size), "binary": args.binary},
    )
    manifest.record_output(args.out)
    manifest.write_sidecar(args.out)
    _print_json(
        {
            "n_bits": int(bits.size),
            "capacity_bits": stego.lsb_capacity_bits(image),
            "out": str(args.out),
            "manifest": manifest.to_dict(),
        }
    )


def _cmd_stego_extract(args) -> None:
    image = stego.read_ppm(args.image)
    bits = stego.lsb_extract(image, args.n_bits)
    result: dict = {"n_bits": int(bits.size)}
    if args.as_text:
        result["text"] = stego.bits_to_ascii(bits)
    else:
        result["bits"] = "".join(str(int(b)) for b in bits)
    if args.out:
        Path(args.out).write_text(result.get("text", result.get("bits", "")))
    _print_json(result)


def _cmd_crack_caesar(args) -> None:
    text = _read_text_arg(args)
    if args.profile != "en":
        raise ValueError(f"unknown language profile {args.profile!r}")
    crack = ciphers.crack_caesar(text)
    _print_json(
        {
            "shift": crack.shift,
            "low_confidence": crack.low_confidence,
            "chi_square": crack.chi_square,
            "decrypted": ciphers.caesar(text, -crack.shift),
        }
    )


def _cmd_demo_e2e(args) -> None:
    # Key relay composition: two key-exchange sessions against a relay node,
    # the payload travels under the first key, the relay word under XOR.
    message_bits = stego.ascii_to_bits(args.message)
    channel = qkd.ChannelSpec(loss_probability=args.loss, depolarizing_probability=args.depol)
    eve = qkd.EveStrategy.INTERCEPT_RESEND if args.eve == "intercept" else qkd.EveStrategy.NONE
    rounds = args.n if args.n else max(8 * message_bits.size, 4096)
    session_a = qkd.bb84_run(rounds, channel, eve, seed=args.seed)
    session_b = qkd.bb84_run(rounds, channel, qkd.EveStrategy.NONE, seed=args.seed + 1)

    need = message_bits.size
    if session_a.n_sifted < need or session_b.n_sifted < need:
        raise RuntimeError(
            f"insufficient sifted key: need {need} bits, got "
            f"{session_a.n_sifted} and {session_b.n_sifted}; increase --n"
        )
    key_a_alice = session_a.sifted_alice[:need]
    key_a_node = session_a.sifted_bob[:need]
    key_b_node = session_b.sifted_alice[:need]
    key_b_remote = session_b.sifted_bob[:need]

    ciphertext = ciphers.otp_xor(key_a_alice, message_bits)
    relay_word = qkd.relay_encode(key_a_node, key_b_node)
    key_a_at_remote = qkd.relay_decode(relay_word, key_b_remote)
    decrypted_bits = ciphers.otp_xor(key_a_at_remote, ciphertext)
    try:
        decrypted = stego.bits_to_ascii(decrypted_bits)
    except ValueError:
        decrypted = None
    recovered = decrypted == args.message

    compromised = session_a.qber > args.qber_alarm or session_b.qber > args.qber_alarm
    result = {
        "message": args.message,
        "rounds_per_session": rounds,
        "qber_a": session_a.qber,
        "qber_b": session_b.qber,
        "qber_alarm_level": args.qber_alarm,
        "compromised": compromised,
        "ciphertext_hex": qkd.bits_to_hex(ciphertext),
        "recovered": recovered,
        "decrypted": decrypted,
        "manifest": RunManifest(
            command="demo-e2e",
            params={
                "message": args.message,
                "n": rounds,
                "loss": args.loss,
                "depol": args.depol,
                "eve": args.eve,
                "qber_alarm": args.qber_alarm,
            },
            seed=args.seed,
        ).to_dict(),
    }
    if not recovered and not compromised:
        raise RuntimeError("plaintext not recovered on a clean channel")
    if args.out:
        _write_json(args.out, result)
    _print_json(result)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonlab",
        description="Single-photon quantum communication workbench",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    # spdc
    p_spdc = sub.add_parser("spdc", help="pair-source physics")
    spdc_sub = p_spdc.add_subparsers(dest="spdc_command", required=True)

    p = spdc_sub.add_parser("idler", help="idler wavelength from energy conservation")
    p.add_argument("--pump", type=float, required=True)
    p.add_argument("--signal", type=float, required=True)
    p.add_argument("--pump-unc", type=float, default=0.0)
    p.add_argument("--signal-unc", type=float, default=0.0)
    p.set_defaults(func=_cmd_spdc_idler)

    p = spdc_sub.add_parser("tuning-curve", help="idler wavelengths over a signal scan, as CSV")
    p.add_argument("--pump", type=float, required=True)
    p.add_argument("--pump-unc", type=float, default=0.0)
    p.add_argument("--signal-start", type=float, required=True)
    p.add_argument("--signal-stop", type=float, required=True)
    p.add_argument("--signal-unc", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spdc_tuning_curve)

    p = spdc_sub.add_parser("qpm", help="poling period that compensates a phase mismatch")
    p.add_argument("--delta-k", type=float, required=True, help="phase mismatch, 1/um")
    p.add_argument("--order", type=int, default=1)
    p.set_defaults(func=_cmd_spdc_qpm)

    p = spdc_sub.add_parser("polarizations", help="process-type polarization triple")
    p.add_argument("--type", required=True, choices=["Type0", "TypeI", "TypeII"])
    p.add_argument("--pump", required=True, choices=["H", "V"])
    p.set_defaults(func=_cmd_spdc_polarizations)

    p = spdc_sub.add_parser("deff", help="effective nonlinearity of a crystal preset")
    p.add_argument("--crystal", required=True)
    p.add_argument("--config", default=None, help="crystal preset JSON (defaults to built-ins)")
    p.add_argument("--pump-dir", default="0,0,1")
    p.add_argument("--signal-dir", default="0,0,1")
    p.add_argument("--idler-dir", default="0,0,1")
    p.set_defaults(func=_cmd_spdc_deff)

    # sim
    p = sub.add_parser("sim", help="Monte Carlo time-tag simulation of a pulsed pair source")
    p.add_argument("--pulses", type=int, required=True)
    p.add_argument("--mu", type=float, required=True, help="mean pairs per pulse")
    p.add_argument("--period-ns", type=float, default=12.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trans1", type=float, default=1.0)
    p.add_argument("--trans2", type=float, default=1.0)
    for side in (1, 2):
        p.add_argument(f"--preset{side}", default=None, help="detector preset FAMILY[:VARIANT]")
        p.add_argument(f"--eff{side}", type=float, default=1.0)
        p.add_argument(f"--dark{side}", type=float, default=0.0)
        p.add_argument(f"--jitter{side}", type=float, default=0.0)
        p.add_argument(f"--dead{side}", type=float, default=0.0)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.add_argument("--format", choices=["csv", "npz"], default="csv")
    p.set_defaults(func=_cmd_sim)

    # fit
    p = sub.add_parser("fit", help="coincidence histogram plus Gaussian peak fit and SNR")
    p.add_argument("--in-a", default=None)
    p.add_argument("--in-b", default=None)
    p.add_argument("--hist", default=None, help="fit a stored histogram JSON instead")
    p.add_argument("--bin-ps", type=int, default=25)
    p.add_argument("--window-ps", type=int, default=2000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit)

    # calibrate
    p = sub.add_parser("calibrate", help="absolute detector calibration from pair counts")
    p.add_argument("--ns", type=int, default=None)
    p.add_argument("--ni", type=int, default=None)
    p.add_argument("--nc", type=int, default=None)
    p.add_argument("--simulate", action="store_true", help="thin simulated pairs instead")
    p.add_argument("--pairs", type=int, default=100_000)
    p.add_argument("--eta-s", type=float, default=0.64)
    p.add_argument("--eta-i", type=float, default=0.40)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_calibrate)

    # tomo
    p_tomo = sub.add_parser("tomo", help="two-qubit state tomography")
    tomo_sub = p_tomo.add_subparsers(dest="tomo_command", required=True)

    p = tomo_sub.add_parser("simulate", help="generate a 16-setting coincidence dataset")
    p.add_argument("--state", required=True)
    p.add_argument("--n-ref", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tomo_simulate)

    p = tomo_sub.add_parser("reconstruct", help="maximum-likelihood reconstruction plus metrics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--target", default=None, help="report fidelity against this state")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_tomo_reconstruct)

    # qkd
    p_qkd = sub.add_parser("qkd", help="BB84 sessions and the key relay")
    qkd_sub = p_qkd.add_subparsers(dest="qkd_command", required=True)

    p = qkd_sub.add_parser("bb84", help="run one BB84 session")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--loss", type=float, default=0.0)
    p.add_argument("--depol", type=float, default=0.0)
    p.add_argument("--eve", choices=["none", "intercept"], default="none")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_qkd_bb84)

    p = qkd_sub.add_parser("relay", help="XOR trusted-node relay word")
    p.add_argument("--key-a", required=True, help="hex bits")
    p.add_argument("--key-b", required=True, help="hex bits")
    p.add_argument("--decode", action="store_true")
    p.set_defaults(func=_cmd_qkd_relay)

    # cipher
    p = sub.add_parser("cipher", help="classical cipher suite")
    p.add_argument(
        "name",
        choices=["railfence", "caesar", "rot13", "vigenere", "playfair", "homophonic", "otp"],
    )
    p.add_argument("mode", choices=["encrypt", "decrypt"])
    p.add_argument("--key", default=None)
    p.add_argument("--key-hex", default=None)
    p.add_argument("--shift", type=int, default=None)
    p.add_argument("--rails", type=int, default=None)
    p.add_argument("--table", default=None, help="25 letters, row-major")
    p.add_argument("--text", default=None)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cipher)

    # stego
    p_stego = sub.add_parser("stego", help="LSB steganography on PPM images")
    stego_sub = p_stego.add_subparsers(dest="stego_command", required=True)

    p = stego_sub.add_parser("embed")
    p.add_argument("--image", required=True)
    p.add_argument("--payload-text", default=None)
    p.add_argument("--payload-file", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--ascii", dest="binary", action="store_false", help="write P3 instead of P6")
    p.set_defaults(func=_cmd_stego_embed, binary=True)

    p = stego_sub.add_parser("extract")
    p.add_argument("--image", required=True)
    p.add_argument("--n-bits", type=int, required=True)
    p.add_argument("--as-text", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stego_extract)

    # crack
    p_crack = sub.add_parser("crack", help="ciphertext-only attacks")
    crack_sub = p_crack.add_subparsers(dest="crack_command", required=True)
    p = crack_sub.add_parser("caesar")
    p.add_argument("--text", default=None)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--profile", default="en")
    p.set_defaults(func=_cmd_crack_caesar)

    # demo-e2e
    p = sub.add_parser(
        "demo-e2e",
        help="key exchange, one-time-pad encryption and the relay, end to end",
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--message", default="PHYSICS IS FUN")
    p.add_argument("--n", type=int, default=None, help="rounds per session")
    p.add_argument("--loss", type=float, default=0.0)
    p.add_argument("--depol", type=float, default=0.0)
    p.add_argument("--eve", choices=["none", "intercept"], default="none")
    p.add_argument("--qber-alarm", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_demo_e2e)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: I/O, insufficient key, ...
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
